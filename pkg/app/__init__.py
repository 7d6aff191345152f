"""histkit: interference of local-measurement histories"""
