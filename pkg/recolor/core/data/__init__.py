"""
Data

Graph and colouring file formats, desk-scale graph corpora and experiment
payload exports.
"""
