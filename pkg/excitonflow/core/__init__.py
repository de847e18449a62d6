"""ExcitonFlow core engines."""
