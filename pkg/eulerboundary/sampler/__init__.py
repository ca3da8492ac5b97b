"""Monte Carlo witnesses"""
