"""Output formatting utilities"""
