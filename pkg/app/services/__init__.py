"""Services for point, sweep and verification runs"""
