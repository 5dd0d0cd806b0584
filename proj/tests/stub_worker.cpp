// Minimal line-protocol worker used by the objective_io tests and the
// acceptance suite. Reads one request line from stdin, answers one JSON
// line on stdout. The first argument selects the behavior:
//   quad (default) - deterministic smooth objective over the params
//   echo           - fixed reply {"objective":1.5,...,"eval_seconds":0.1}
//   fail           - exits with status 3 before replying
//   malformed      - prints a non-JSON line
//   sleep          - sleeps 10 s before replying (for timeout tests)
//   failflag       - replies with "failed": true

#include <unistd.h>

#include <iostream>
#include <string>

#include <json.hpp>

int main(int argc, char** argv) {
    std::string mode = argc > 1 ? argv[1] : "quad";
    std::string line;
    if (!std::getline(std::cin, line)) return 2;

    nlohmann::json request = nlohmann::json::parse(line, nullptr, false);
    if (request.is_discarded()) return 2;

    if (mode == "fail") return 3;
    if (mode == "malformed") {
        std::cout << "this is not a protocol reply\n";
        return 0;
    }
    if (mode == "sleep") {
        ::sleep(10);
    }

    nlohmann::json reply;
    if (mode == "echo") {
        reply = {{"objective", 1.5}, {"failed", false}, {"eval_seconds", 0.1}};
    } else if (mode == "failflag") {
        reply = {{"objective", 0.0}, {"failed", true}, {"eval_seconds", 0.05}};
    } else {
        double value = 10.0;
        for (const auto& [key, v] : request.at("params").items()) {
            double x = v.get<double>();
            value -= (x - 0.3) * (x - 0.3);
        }
        reply = {{"objective", value},
                 {"failed", false},
                 {"eval_seconds", 0.25}};
    }
    std::cout << reply.dump() << std::endl;
    return 0;
}
