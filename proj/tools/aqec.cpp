#include "cli.hpp"

int main(int argc, char** argv) {
  return aqec::cli::run(argc, argv);
}
