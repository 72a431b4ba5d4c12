"""C-subset frontend: lexing, parsing, type checking."""

from .lexer import Lexer, parse_define_option
from .parser import parse_translation_unit
from .typecheck import TypedProgram, resolve_builtins, typecheck
