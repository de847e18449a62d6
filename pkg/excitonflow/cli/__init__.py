"""ExcitonFlow command line front end."""
