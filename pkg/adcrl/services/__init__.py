"""
Learning services: the CTD3 agent, its TD3 reference, checkpoints and gradient suites.
"""
