"""Opcode table for the compiled formula representation.

A formula is flattened to postfix as a sequence of (opcode, argument)
pairs; the argument is a variable index for OP_VAR and 0 otherwise.
Both kernel backends interpret this encoding with a small stack
machine, so the numbering here is load-bearing and must match the
constants in _core.pyx.
"""

OP_VAR = 0
OP_TOP = 1
OP_AND = 2
OP_OR = 3
OP_IMP = 4
OP_NEG = 5
OP_BOT = 6
OP_BOX = 7
OP_BBOX = 8
