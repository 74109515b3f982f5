// Builds the amalgamated Catch2 implementation (including its main) once.
#include <catch2/catch_amalgamated.cpp>
