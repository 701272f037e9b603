"""
Actor-Director-Critic reinforcement learning package (CTD3 and ablations).
"""
__version__ = "1.0.0"
