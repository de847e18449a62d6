"""ExcitonFlow test suite."""
