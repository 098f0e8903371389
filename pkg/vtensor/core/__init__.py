"""
VTensor v1.0 - Core algebra
Scalars, formal series, delta kernels, Fock modules, intertwining maps and
the dual actions built on them.
"""
