// Command line front end for the Dirac quantum dot pipelines.

#include "diracdot/errors.hpp"
#include "diracdot/io.hpp"

#include <iostream>
#include <string>
#include <vector>

namespace {

const char* kUsage = R"(usage: diracdot <command> [--flag value ...]

commands:
  spectrum      bound levels eps(v) over a well-depth range
  capture       critical / supercritical capture depths
  resonances    complex resonance trajectories over a well-depth range
  delay         scattering phase and Wigner time delay over an energy range
  consistency   pair resonances with delay-curve maxima
  spinor        radial spinor components over a radius range
  convert       physical <-> natural unit conversion

common flags:
  --mu M --ell L --v V
  --v-min A --v-max B --v-steps N
  --eps-min A --eps-max B --eps-steps N
  --seeds a+bi,c+di        initial resonance guesses (else hunted)
  --count N                number of depths per kind (capture)
  --state S --eps a+bi --rho-min A --rho-max B --rho-steps N   (spinor)
  --direction to-natural|from-natural --E X --V0 X --R X --m X --vF X --hbar X
  --output PATH            default: stdout
  --format csv|json|svg    default: csv
  --config FILE            flat key = value defaults, flags override
)";

} // namespace

int main(int argc, char** argv)
{
    std::vector<std::string> args(argv + 1, argv + argc);
    if (args.empty() || args[0] == "--help" || args[0] == "-h") {
        std::cout << kUsage;
        return args.empty() ? 1 : 0;
    }
    try {
        diracdot::io::RunConfig cfg = diracdot::io::parse_config(args);
        return diracdot::io::run(cfg, std::cerr);
    } catch (const diracdot::UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n" << kUsage;
        return 1;
    } catch (const diracdot::DomainError& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return 2;
    } catch (const diracdot::BranchError& e) {
        std::cerr << "branch error: " << e.what() << "\n";
        return 2;
    } catch (const diracdot::SingularArgument& e) {
        std::cerr << "singular argument: " << e.what() << "\n";
        return 2;
    } catch (const diracdot::IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 4;
    } catch (const diracdot::Error& e) {
        // convergence-class failures: NoConvergence, TrackLost, EscapedRegion,
        // UnmatchedResonance, UnwrapError, IndeterminatePhase, MatchError, ...
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 5;
    }
}
