"""
Discrete-event replay of the training modes and trace export.
"""
