"""
Test Suite für ridgekit
"""
