"""Left-column reconstruction, membership and mixture decomposition"""
