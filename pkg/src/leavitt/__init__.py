"""Exact computation in Leavitt path algebras and Steinberg algebras of graphs."""
