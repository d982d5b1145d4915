"""Free holomorphic functions on the noncommutative ball, computed on truncated Fock spaces."""
