#include "ensure/cli/commands.hpp"

int main(int argc, char **argv)
{
  return ensure::run_cli(argc, argv);
}
