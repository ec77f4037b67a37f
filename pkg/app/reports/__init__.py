# Report rendering and reproduction suites
