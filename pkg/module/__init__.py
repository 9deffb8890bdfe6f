"""Π(n) 双陪集空间数值工具包"""
