"""
Module: Experiment Suite

Runs an `ExperimentSpec` and tabulates the results with pandas.

Each generated network is discovered once per mode, then closed by injecting data
traffic on every residual interface. The table holds one ``run`` row per network and
mode, and one ``mean`` row per (family, n, mode) averaged over seeds. Rows are sorted,
so the CSV does not depend on worker scheduling; wall-clock seconds are only included
on request.
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import docflow as doc
import pandas as pd

from ..progress import LoadProgress
from ..simulator.harness import Simulation
from ..topogen.generator import generate_topology

logger = logging.getLogger(__name__)

KEY_COLUMNS = ['row', 'family', 'n', 'mode', 'seed']
METRIC_COLUMNS = [
    'probe_triggers', 'up_calls', 'sim_ticks', 'selections', 'corrections', 'resolve_requests',
    'drops', 'rejected', 'late_discoveries', 'missing_links', 'extra_links', 'residual_missing',
]
VERDICT_COLUMNS = ['verdict', 'final_verdict']
CLEAN = 'CLEAN'


def run_network(run, modes):
    """
    Discovers one generated network under every mode.

    Args:
        run (RunSpec): Family, size and seed of the network.
        modes (list): `DiscoveryMode` values.

    Returns:
        list: One result row (dict) per mode.
    """
    net = generate_topology(run.family, run.nodes, run.seed)
    rows = []
    for mode in modes:
        sim = Simulation(net, mode, run.seed, transcript=False)
        result = sim.run_discovery()
        final = sim.close_late_discovery(result.residual)
        row = dict(family=run.family, n=run.nodes, mode=mode.label, seed=run.seed)
        row.update(result.metrics.to_dict(timing=True))
        row.update(
            missing_links=len(result.report.missing_links),
            extra_links=len(result.report.extra_links),
            residual_missing=len(final.missing_links),
            verdict=result.report.verdict,
            final_verdict=CLEAN if final.is_clean and not final.missing_links else 'DIRTY',
        )
        rows.append(row)
    return rows


def _run_network(args):
    return run_network(*args)


@dataclass
class SuiteResult:
    """
    Attributes:
        table (pandas.DataFrame): Run and mean rows.
        timing (bool): Whether the table carries wall-clock seconds.
    """
    table: pd.DataFrame
    timing: bool = False

    @property
    def runs(self):
        return self.table[self.table['row'] == 'run']

    @property
    def means(self):
        return self.table[self.table['row'] == 'mean']

    @property
    def clean(self):
        """True when every run's verification report is CLEAN."""
        return bool((self.runs['verdict'] == CLEAN).all())

    def mean(self, family, mode, column, n=None):
        """Mean of `column` for one family and mode label."""
        rows = self.means[(self.means['family'] == family) & (self.means['mode'] == mode)]
        if n is not None:
            rows = rows[rows['n'] == n]
        return float(rows[column].iloc[0])

    def to_csv(self, path=None):
        return self.table.to_csv(path, index=False, float_format='%.3f', lineterminator='\n')

    def __repr__(self):
        return self.markdown

    def _repr_markdown_(self):
        return self.markdown

    @property
    def markdown(self):
        means = self.means
        return doc.Document(
            doc.Title(f'Suite: {"CLEAN" if self.clean else "NOT CLEAN"}', level=3),
            doc.Sequence({
                f'{row.family} n={row.n} {row.mode}':
                    f'triggers {row.probe_triggers:.2f}, up-calls {row.up_calls:.2f}, ticks {row.sim_ticks:.1f}'
                for row in means.itertuples()
            }),
        ).markdown


def tabulate(rows, timing=False):
    """
    Builds the sorted suite table from run rows.

    Returns:
        pandas.DataFrame: ``mean`` rows followed by ``run`` rows, each sorted by family, n and mode.
    """
    metrics = METRIC_COLUMNS + (['wall_clock'] if timing else [])
    runs = pd.DataFrame(rows)
    runs = runs.sort_values(['family', 'n', 'mode', 'seed'], kind='stable').reset_index(drop=True)
    groups = runs.groupby(['family', 'n', 'mode'], sort=True)
    means = groups[metrics].mean().reset_index()
    for column in VERDICT_COLUMNS:
        means[column] = groups[column].agg(lambda verdicts: CLEAN if (verdicts == CLEAN).all() else 'DIRTY').values
    means['row'] = 'mean'
    means['seed'] = ''
    runs['row'] = 'run'
    columns = KEY_COLUMNS + metrics + VERDICT_COLUMNS
    return pd.concat([means[columns], runs[columns]], ignore_index=True)


def run_suite(spec, quiet=True):
    """
    Runs every network and mode of `spec`.

    Args:
        spec (ExperimentSpec): The sweep.
        quiet (bool): Suppress the progress line.

    Returns:
        SuiteResult: The table; written to ``spec.out`` when set.
    """
    runs = spec.runs()
    modes = spec.modes()
    progress = LoadProgress(f'suite of {len(runs)} networks', timer=True, total=len(runs), enabled=not quiet)
    rows = []
    try:
        if spec.workers > 1:
            with ProcessPoolExecutor(max_workers=spec.workers) as executor:
                for run, result in zip(runs, executor.map(_run_network, [(run, modes) for run in runs])):
                    rows.extend(result)
                    progress.step(f'{run.family} n={run.nodes} seed={run.seed}')
        else:
            for run in runs:
                rows.extend(run_network(run, modes))
                progress.step(f'{run.family} n={run.nodes} seed={run.seed}')
    except Exception:
        progress.error('suite failed')
        raise
    result = SuiteResult(tabulate(rows, spec.timing), spec.timing)
    progress.done(f'suite done: {"clean" if result.clean else "NOT clean"}')
    if spec.out:
        result.to_csv(spec.out)
        logger.info('wrote %d rows to %s', len(result.table), spec.out)
    return result
