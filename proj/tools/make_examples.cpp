#include <filesystem>
#include <fstream>
#include <iostream>

#include "istab/cli/config.hpp"

int main(int argc, char** argv) {
  const std::filesystem::path dir = argc > 1 ? argv[1] : "configs";
  std::filesystem::create_directories(dir);
  for (const auto& name : istab::cli::example_names()) {
    const auto path = dir / (name + ".yaml");
    std::ofstream(path) << istab::cli::emit_config(istab::cli::example_config(name));
    std::cout << path.string() << "\n";
  }
  return 0;
}
