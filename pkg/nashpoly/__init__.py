"""
nashpoly - Nash equilibria of polynomial games via moment relaxations.
"""

__version__ = '1.0.0'
