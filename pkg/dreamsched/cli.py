#!/usr/bin/env python
"""
Command-line entry point.

    dreamsched profile gen --layers 30 --seed 7 --regime comm-heavy --out p.profile
    dreamsched schedule --profile p.profile --H 5 --out p.schedule --explain
    dreamsched oracle --profile p.profile --H 5
    dreamsched simulate --profile p.profile --mode plsgd --schedule p.schedule --iters 10 --trace t.json
    dreamsched train --config train.yaml --out trace.csv
    dreamsched compare --profile p.profile --H 5 --iters 100
    dreamsched bench sched --max-layers 30

Command output goes to stdout and log messages to stderr. Exit codes:
0 on success, 1 on validation errors, 2 on internal errors.
"""
import sys

import numpy as np

from dreamsched.utils.logger import logger
from dreamsched.utils.parser import Parser
from dreamsched.utils import fileio
from dreamsched.analysis.profile import (load_profile, save_profile,
                                         synth_profile, REGIMES)
from dreamsched.analysis.cost import period_objective, format_cost_report
from dreamsched.analysis.scheduler import (schedule_dfs, schedule_brute_force,
                                           bubble_fill, load_schedule,
                                           save_schedule, format_schedule)
from dreamsched.simulation.simulator import simulate_run, MODES
from dreamsched.simulation.trace import export_trace
from dreamsched.simulation.analyzer import compare_modes, format_comparison

############################################################
# Verbs

def profile_gen(opts):
    if logger.file_found(opts.out,opts.force):
        msg = "Output exists (use --force to overwrite): %s"%opts.out
        raise IOError(msg)
    profile = synth_profile(opts.layers,opts.seed,opts.regime)
    save_profile(profile,opts.out)

def profile_show(opts):
    profile = load_profile(opts.profile)
    fp,bp,comm = profile.totals()
    sys.stdout.write("label=%s\nlayers=%i\nt_fp=%r\nt_bp=%r\nt_comm=%r\n"%(
        profile.label,profile.nlayers,fp,bp,comm))

def schedule(opts):
    profile = load_profile(opts.profile)
    report = schedule_dfs(profile,opts.H)
    result = report.best if opts.no_fill else bubble_fill(report.best,profile)
    if opts.explain:
        sys.stdout.write(report.format_log())
        sys.stdout.write("solutions_explored=%i\n"%report.solutions_explored)
        sys.stdout.write(format_cost_report(period_objective(result,profile)))
    if opts.out:
        save_schedule(result,opts.out)
    else:
        sys.stdout.write(format_schedule(result))

def oracle(opts):
    profile = load_profile(opts.profile)
    report = schedule_dfs(profile,opts.H)
    exact = schedule_brute_force(profile,opts.H)
    report.oracle_cost = exact.best_cost
    sys.stdout.write("dfs_schedule=%s\n"%report.best)
    sys.stdout.write("oracle_schedule=%s\n"%exact.best)
    sys.stdout.write("dfs_cost=%r\n"%float(report.best_cost))
    sys.stdout.write("oracle_cost=%r\n"%float(exact.best_cost))
    sys.stdout.write("dfs_solutions=%i\n"%report.solutions_explored)
    sys.stdout.write("bf_candidates=%i\n"%exact.solutions_explored)
    sys.stdout.write("gap=%.1f%%\n"%(100*report.gap))

def simulate(opts):
    profile = load_profile(opts.profile)
    schedule = load_schedule(opts.schedule) if opts.schedule else None
    timeline = simulate_run(profile,opts.mode,schedule,opts.iters,opts.H)
    if opts.trace:
        export_trace(timeline,opts.trace)
    sys.stdout.write("mode=%s makespan=%r avg_iter=%r\n"%(
        timeline.mode,float(timeline.makespan),float(timeline.avg_iteration)))

def train(opts):
    from dreamsched.training.problem import Problem
    from dreamsched.training.trainer import TrainerConfig, run_training
    from dreamsched.training.experiment import (rate_experiment,
                                                divergence_experiment)
    config = TrainerConfig(opts.config)
    problem = Problem.from_config(config)
    seeds = list(range(config['seed'],config['seed']+opts.seeds))

    if opts.experiment == 'rate':
        fit = rate_experiment(problem,config,opts.iters_list,seeds)
        data = np.rec.fromarrays([fit.R,fit.subopt],names=['R','subopt'])
        if opts.out: fileio.write(opts.out,data)
        sys.stdout.write("slope=%r\nintercept=%r\nrvalue=%r\n"%(
            float(fit.slope),float(fit.intercept),float(fit.rvalue)))
    elif opts.experiment == 'divergence':
        results = divergence_experiment(problem,config,seeds)
        for name,values in results.items():
            sys.stdout.write("%s=%r\n"%(name,float(np.mean(values))))
    else:
        trace = run_training(config,problem)
        if opts.out: trace.write(opts.out)
        sys.stdout.write(trace.format_summary())

def compare(opts):
    profile = load_profile(opts.profile)
    comparison = compare_modes(profile,opts.H,opts.iters)
    sys.stdout.write(format_comparison(comparison))

def bench_sched(opts):
    from dreamsched.analysis.bench import bench_scheduler
    regimes = opts.regime if opts.regime else None
    data = bench_scheduler(opts.max_layers,opts.H,opts.seed,regimes,
                           opts.bandwidths,opts.ncores)
    if opts.out:
        fileio.write(opts.out,data)
    else:
        fileio.write_table(sys.stdout,data)

############################################################
# Parser

def build_parser():
    parser = Parser(prog='dreamsched',description=__doc__.split('\n')[1])
    parser.add_version()
    verbs = parser.add_subparsers(dest='verb',metavar='verb')
    verbs.required = True

    # profile
    p = verbs.add_parser('profile',help='Synthesize or inspect profiles.')
    sub = p.add_subparsers(dest='action',metavar='action')
    sub.required = True
    gen = sub.add_parser('gen',help='Write a synthetic profile.')
    gen.add_verbose()
    gen.add_force()
    gen.add_seed()
    gen.add_argument('--layers',type=int,required=True,help='Number of layers.')
    gen.add_argument('--regime',default='balanced',choices=list(REGIMES),
                     help='Communication/computation regime.')
    gen.add_out(required=True)
    gen.set_defaults(func=profile_gen)
    show = sub.add_parser('show',help='Validate a profile and print its totals.')
    show.add_verbose()
    show.add_profile()
    show.set_defaults(func=profile_show)

    # schedule
    p = verbs.add_parser('schedule',help='Search a schedule with the pruned DFS.')
    p.add_verbose()
    p.add_profile()
    p.add_period()
    p.add_out()
    p.add_argument('--no-fill',action='store_true',help='Skip bubble filling.')
    p.add_argument('--explain',action='store_true',
                   help='Print the search decisions and the cost breakdown.')
    p.set_defaults(func=schedule)

    # oracle
    p = verbs.add_parser('oracle',help='Compare the DFS with brute force.')
    p.add_verbose()
    p.add_profile()
    p.add_period()
    p.set_defaults(func=oracle)

    # simulate
    p = verbs.add_parser('simulate',help='Simulate one training mode.')
    p.add_verbose()
    p.add_profile()
    p.add_argument('--mode',required=True,choices=MODES,help='Training mode.')
    p.add_argument('--schedule',default=None,help='Schedule file (plsgd).')
    p.add_iters()
    p.add_period(required=False,default=None)
    p.add_argument('--trace',default=None,help='Trace-event JSON output.')
    p.set_defaults(func=simulate)

    # train
    p = verbs.add_parser('train',help='Run the convergence lab.')
    p.add_verbose()
    p.add_config()
    p.add_out()
    p.add_argument('--experiment',default='single',
                   choices=['single','rate','divergence'],
                   help='Single run or multi-seed experiment.')
    p.add_argument('--seeds',default=1,type=int,
                   help='Number of consecutive seeds for experiments.')
    p.add_argument('--iters-list',default=[500,1000,2000,4000],type=int,
                   nargs='+',help='Iteration counts for the rate experiment.')
    p.set_defaults(func=train)

    # compare
    p = verbs.add_parser('compare',help='Simulate and compare all modes.')
    p.add_verbose()
    p.add_profile()
    p.add_period()
    p.add_iters()
    p.set_defaults(func=compare)

    # bench
    p = verbs.add_parser('bench',help='Benchmarks.')
    sub = p.add_subparsers(dest='action',metavar='action')
    sub.required = True
    b = sub.add_parser('sched',help='DFS vs brute-force scaling table (CSV).')
    b.add_verbose()
    b.add_seed()
    b.add_ncores()
    b.add_out()
    b.add_argument('--max-layers',type=int,required=True,
                   help='Largest layer count.')
    b.add_period(required=False,default=5)
    b.add_argument('--regime',action='append',choices=list(REGIMES),
                   help='Regime to include (repeatable; default all).')
    b.add_argument('--bandwidths',type=float,nargs='+',default=None,
                   help='Link bandwidths (B/s) to sweep.')
    b.set_defaults(func=bench_sched)

    return parser

def main(argv=None):
    logger.set_stream()
    parser = build_parser()
    try:
        opts = parser.parse_args(argv)
        opts.func(opts)
    except SystemExit as e:
        # --help and --version
        return e.code or 0
    except (ValueError,KeyError,IOError,OSError) as e:
        msg = e.args[0] if isinstance(e,KeyError) and e.args else str(e)
        logger.error(msg)
        return 1
    except Exception as e:
        logger.error("internal error: %s: %s"%(type(e).__name__,e))
        return 2
    return 0

if __name__ == "__main__":
    sys.exit(main())
