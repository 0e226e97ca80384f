# Tests for hecke-product
