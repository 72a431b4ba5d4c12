"""Guarded-GOTO intermediate representation and transforms."""

from .ir import GotoFunction, GotoModel, Instr
from .convert import convert_to_goto, number_loops
from .transforms import (build_entry_harness, remove_function_pointers,
                         remove_returns)
from .binary import link, read_model, serialize, deserialize, write_model
from .printer import print_loop_ids, print_model
