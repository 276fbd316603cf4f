"""
Figure-data pipeline runner.
Chains the neckflow subcommands that produce every CSV series behind the figures.
"""

import argparse
import json
import subprocess
import sys
import time
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def run_command(args, description):
    """Run one CLI subcommand and stop the pipeline on failure."""
    print(f'\n{"="*70}')
    print(f'{description}')
    print(f'{"="*70}\n')

    cmd = [sys.executable, str(ROOT / 'main.py'), *args]
    result = subprocess.run(cmd, capture_output=False)

    if result.returncode != 0:
        print(f'\n❌ Error in: {description} (exit {result.returncode})')
        sys.exit(result.returncode)

    print(f'\n✓ {description} completed successfully\n')


def run_dir(out, lam, n):
    return str(Path(out) / f'evolve_lambda={lam!r}_n={n}')


def main():
    parser = argparse.ArgumentParser(description='Produce the figure CSV series')
    parser.add_argument('--out', default='results')
    parser.add_argument('--n', type=int, default=1000)
    parser.add_argument('--jobs', type=int, default=1)
    parser.add_argument('--tol', type=float, default=1e-3)
    args = parser.parse_args()

    start_time = time.time()
    out, n, jobs = args.out, str(args.n), str(args.jobs)

    print('\n' + '='*70)
    print('neckflow figure-data pipeline')
    print('='*70)

    run_command(['search', '--out', out, '--n', n, '--jobs', jobs, '--tol', str(args.tol)],
                'Step 1: Critical shape parameter search')
    search = json.loads((Path(out) / f'search_n={n}.json').read_text(encoding='utf-8'))
    lam_lo, lam_hi = search['lambda_lo'], search['lambda_hi']
    lam_c = 0.5 * (lam_lo + lam_hi)

    run_command(['evolve', '--out', out, '--n', n, '--lambda', repr(lam_hi)],
                'Step 2: Near-critical supercritical run')
    run_command(['compare', '--run', run_dir(out, lam_hi, args.n), '--window', '2', '--last', '20'],
                'Step 3: Rescaled snapshots against the unit soliton')

    for lam in (0.92, 0.94, 0.96):
        run_command(['evolve', '--out', out, '--n', n, '--lambda', repr(lam)], f'Step 4: Supercritical run lambda={lam}')
        run_command(['compare', '--run', run_dir(out, lam, args.n), '--window', '0.2', '--tip-matched'],
                    f'Step 4: Tip-matched soliton lambda={lam}')

    generic = run_dir(out, 0.96, args.n)
    run_command(['fit', '--run', generic, '--kind', 'cusp'], 'Step 5: Cusp profile fit')
    run_command(['fit', '--run', generic, '--kind', 'rate', '--quantity', 'H_center'], 'Step 5: Center curvature rate')
    run_command(['fit', '--run', generic, '--kind', 'neck'], 'Step 5: Rescaled neck radius')

    lam_sub = lam_lo - 5e-4
    run_command(['evolve', '--out', out, '--n', n, '--lambda', repr(lam_sub)], 'Step 6: Slightly subcritical run')
    run_command(['fit', '--run', run_dir(out, lam_sub, args.n), '--kind', 'degenerate', '--m', '4'],
                'Step 6: Degenerate neckpinch fit')

    run_command(['sweep', '--out', out, '--n', n, '--jobs', jobs,
                 '--start', repr(lam_hi + 0.002), '--stop', '0.99', '--num', '8', '--lambda-c', repr(lam_c)],
                'Step 7: Pole curvature sweep and critical exponent')

    elapsed = time.time() - start_time

    print('\n' + '='*70)
    print('✅ FIGURE-DATA PIPELINE FINISHED')
    print('='*70)
    print(f'\nTotal time: {elapsed/60:.1f} minutes')
    print(f'\nlambda_c in [{lam_lo:.6f}, {lam_hi:.6f}]')
    print('\nGenerated outputs:')
    print(f'  - {out}/search_n={n}.json')
    print(f'  - {out}/evolve_*/                (trace, snapshots, manifest, comparison and fit CSVs)')
    print(f'  - {out}/sweep_n={n}.csv')
    print(f'  - {out}/exponent_n={n}.json')


if __name__ == '__main__':
    main()
