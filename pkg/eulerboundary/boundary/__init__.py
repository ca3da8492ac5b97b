"""Extreme and truncated solutions of the dual recursion"""
