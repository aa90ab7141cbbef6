"""State shared by the command modules of one run."""

# The parsed command line, the module logger of __main__ and the validated
# RunConfig of the current command.
options = None
logger = None
configuration = None
