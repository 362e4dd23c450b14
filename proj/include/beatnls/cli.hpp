#pragma once

/// @file cli.hpp
/// @brief Process-level entry point: dispatch, output and exit codes.
///
/// Exit codes: 0 success, 1 validation error, 2 computation failure,
/// 3 verification-suite failure.

#include <exception>
#include <ostream>
#include <string>
#include <vector>

#include "beatnls/commands.hpp"
#include "beatnls/verify.hpp"

namespace beatnls::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitComputation = 2;
inline constexpr int kExitVerify = 3;

/// Runs one invocation. `argv` excludes the program name.
inline int run_main(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
    try {
        const RunConfig cfg = parse_config(argv);
        if (cfg.subcommand == "verify") {
            const auto result = verify::run_verify(cfg, &err);
            emit(cfg, verify::verify_report(result), out);
            for (const auto& c : result.checks) {
                if (!c.pass) err << "FAIL " << c.suite << "/" << c.name << ": " << c.detail << "\n";
            }
            return result.all_pass ? kExitOk : kExitVerify;
        }
        emit(cfg, run_compute(cfg), out);
        return kExitOk;
    } catch (const HelpRequested& h) {
        out << h.text;
        return kExitOk;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const ComputationError& e) {
        err << "computation failed: " << e.what() << "\n";
        return kExitComputation;
    } catch (const std::exception& e) {
        err << "computation failed: " << e.what() << "\n";
        return kExitComputation;
    }
}

}  // namespace beatnls::cli
