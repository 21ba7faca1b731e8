"""
selmut: selection-mutation measure dynamics
"""
