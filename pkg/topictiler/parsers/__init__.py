"""Readers for lexicon, taxonomy and annotation files"""
