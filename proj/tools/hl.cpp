#include <CLI11.hpp>

#include <iostream>

#include "hl/cli.hpp"

int main(int argc, char** argv) {
    hl::cli::RunConfig cfg;
    CLI::App app{"Relational, trace and hyper semantics of a small while language"};
    app.require_subcommand(1);

    auto add_program = [&](CLI::App* c) {
        c->add_option("--program", cfg.program, "program file")->required();
        c->add_option("--space", cfg.space, "state space file or inline JSON")->required();
    };
    auto add_json = [&](CLI::App* c) { c->add_flag("--json", cfg.compact, "single-line JSON output"); };

    auto* sem = app.add_subcommand("sem", "relational semantics and its agreement with the configuration graph");
    add_program(sem);
    add_json(sem);

    auto* trace = app.add_subcommand("trace", "finite traces up to a maximal length");
    add_program(trace);
    trace->add_option("--L", cfg.max_length, "maximal trace length")->check(CLI::PositiveNumber);
    add_json(trace);

    auto* post = app.add_subcommand("post", "image of one precondition triple");
    add_program(post);
    post->add_option("--pre", cfg.pre, "precondition triple (default init)");
    add_json(post);

    auto* hpost = app.add_subcommand("hyper-post", "image of a set of precondition triples");
    add_program(hpost);
    hpost->add_option("--pre", cfg.pre, "precondition set (default [init])");
    add_json(hpost);

    auto* check = app.add_subcommand("check", "check a hyper triple or a proof rule (exit 0 holds, 1 fails, 2 error)");
    check->add_option("--request", cfg.request, "rule request file or inline JSON");
    check->add_option("--program", cfg.program, "program file");
    check->add_option("--space", cfg.space, "state space file or inline JSON");
    check->add_option("--rule", cfg.rule, "rule name")->check(CLI::IsMember(hl::rule_names()));
    check->add_option("--pre", cfg.pre, "precondition set");
    check->add_option("--post", cfg.post, "explicit consequent set for lower rules");
    check->add_option("--post-oracle", cfg.post_oracle, "consequent oracle name, file or inline JSON");
    add_json(check);

    auto* abstract = app.add_subcommand("abstract", "apply an abstraction operator to a subset of a lattice");
    abstract->add_option("--lattice", cfg.lattice, "catalog name, file or inline JSON");
    abstract->add_option("--op", cfg.op, "operator name")->required()->check(CLI::IsMember(hl::operator_names()));
    abstract->add_option("--set", cfg.set, "element names as a JSON list or a file");
    add_json(abstract);

    auto* lab = app.add_subcommand("lattice-lab", "exhaustive closure-law report for operators on a lattice");
    lab->add_option("--lattice", cfg.lattice, "catalog name, file or inline JSON");
    lab->add_option("--op", cfg.op, "operator name (default: all)")->check(CLI::IsMember(hl::operator_names()));
    add_json(lab);

    auto* selftest = app.add_subcommand("selftest", "run the example corpus");
    selftest->add_option("--data", cfg.data, "corpus directory");
    selftest->add_option("--filter", cfg.filter, "run only suites whose name contains this text");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : hl::cli::Error;
    }
    cfg.command = app.get_subcommands().front()->get_name();
    hl::cli::CommandResult r = hl::cli::run(cfg);
    std::cout << r.out;
    std::cerr << r.err;
    return r.code;
}
