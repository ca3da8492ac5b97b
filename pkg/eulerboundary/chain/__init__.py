"""The backward Markov chain and the permutation/path bijection"""
