from .problem_files import (  # noqa: F401
    ProblemFile,
    ProblemFileError,
    parse_problem,
    parse_problem_file,
    serialize_problem,
)
