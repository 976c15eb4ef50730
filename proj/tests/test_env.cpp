#include <doctest.h>

TEST_SUITE("env") {}
