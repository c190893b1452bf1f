# Systolizer package
