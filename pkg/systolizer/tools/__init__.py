# Coxeter, complex, systolization and verification tools
