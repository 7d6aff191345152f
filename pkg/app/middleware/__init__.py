"""Command middleware"""
