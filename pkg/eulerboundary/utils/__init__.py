"""Serialization helpers"""
