"""Shared infrastructure: the Eulerian table, arrays, parameters, settings, errors and streams"""
