"""
Command line interface

``beamspec <subcommand> [options]`` with subcommands

* ``spectrum``: eigenvalues for one gain (CSV/JSON, optional HDF5);
* ``modes``: sampled F_n or G_n profile;
* ``closeness``: d_n = \\|F_n - G_n\\|^2 and partial sums;
* ``resolvent-check``: exact polynomial check of the closed-form inverse;
* ``simulate``: energy trace of the closed-loop beam and its decay fit;
* ``verify``: the acceptance suite, one line per check, exit 0 iff nothing fails.

Floats are written with 17 significant digits; JSON output is one object carrying
``"schema_version": "1"``. Module errors are reported as ``ErrorName: message`` with exit
status 1; bad arguments exit with status 2. ``BEAMSPEC_THREADS`` caps the worker processes
used for index fan-out (0 or unset: all cores).
"""

__author__ = 'beamspec developers'

import argparse, collections, json, os, sys
import numpy as np
import yaml
from beamspec import spectrum, modes, beamoperator, simulator
from beamspec.errors import BeamspecError

SCHEMA_VERSION = '1'
FLOAT_FORMAT = '{:.17g}'
DEFAULT_SEED = 42
THREADS_ENV = 'BEAMSPEC_THREADS'

SPECTRUM_HEADER = ('n', 're_tau', 'im_tau', 're_lambda', 'im_lambda', 'residual', 'err_tau', 'err_re_lambda')
PROFILE_HEADER = ('x', 're_comp1', 'im_comp1', 're_comp2', 'im_comp2')
CLOSENESS_HEADER = ('n', 'd_n', 'partial_sum')
RESOLVENT_HEADER = ('psi', 'phi', 'k', 'identity_residual', 'boundary_residual', 'quadrature_gap')
TRACE_HEADER = ('t', 'E', 'boundary_power')


def worker_count(environ=None):
    """
    Worker processes from BEAMSPEC_THREADS: unset or 0 means all cores, 1 sequential.

    :param environ: mapping to read (default os.environ)
    :return processes: positive integer
    """
    environ = os.environ if environ is None else environ
    value = environ.get(THREADS_ENV, '').strip()
    try:
        n = int(value) if value else 0
    except ValueError:
        raise ValueError('{}="{}" is not an integer'.format(THREADS_ENV, value))
    if n < 0:
        raise ValueError('{}={} must be nonnegative'.format(THREADS_ENV, n))
    return n if n > 0 else (os.cpu_count() or 1)


def _format(value):
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    if isinstance(value, str):
        return value
    return FLOAT_FORMAT.format(float(value))


def write_csv(stream, header, rows):
    """Header line and rows, comma separated, '\\n' line endings"""
    stream.write(','.join(header) + '\n')
    for row in rows:
        stream.write(','.join(_format(v) for v in row) + '\n')


def write_json(stream, command, payload):
    """One JSON object with schema_version and command"""
    obj = collections.OrderedDict([('schema_version', SCHEMA_VERSION), ('command', command)])
    obj.update(payload)
    json.dump(obj, stream, indent=1)
    stream.write('\n')


# argument types: each enforces the owning module's preconditions before dispatch
def _typed(convert, check, description):
    def parse(text):
        try:
            value = convert(text)
        except ValueError:
            raise argparse.ArgumentTypeError('"{}" is not {}'.format(text, description))
        if not check(value):
            raise argparse.ArgumentTypeError('{} is not {}'.format(text, description))
        return value
    return parse


gain_type = _typed(float, lambda v: np.isfinite(v) and v >= 0, 'a finite nonnegative gain')
positive_float = _typed(float, lambda v: np.isfinite(v) and v > 0, 'a positive number')
finite_float = _typed(float, np.isfinite, 'a finite number')


def int_at_least(n):
    return _typed(int, lambda v: v >= n, 'an integer >= {}'.format(n))


def even_at_least(n):
    return _typed(int, lambda v: v >= n and v % 2 == 0, 'an even integer >= {}'.format(n))


def build_parser():
    parser = argparse.ArgumentParser(
        prog='beamspec',
        description='Spectrum, modes, resolvent and energy decay of the boundary-damped Euler-Bernoulli beam',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""environment:
  {}  worker processes for index fan-out (0 or unset: all cores)
""".format(THREADS_ENV))
    sub = parser.add_subparsers(dest='command', metavar='command')
    sub.required = True

    def common(p, fmt=True):
        p.add_argument('--output', '-o', help='output file (default stdout)')
        p.add_argument('--verbose', '-v', action='store_true', help='dump computed objects to stderr')
        if fmt:
            p.add_argument('--format', choices=('csv', 'json'), default='csv', help='output format')

    p = sub.add_parser('spectrum', help='eigenvalues for one gain')
    p.add_argument('--k', type=gain_type, default=1., help='feedback gain')
    p.add_argument('--n-max', type=int_at_least(spectrum.NMIN), default=50, help='largest mode index')
    p.add_argument('--tol', type=positive_float, default=spectrum.TOLERANCE, help='Newton residual tolerance')
    p.add_argument('--hdf5', help='also write the report to this HDF5 file')
    common(p)

    p = sub.add_parser('modes', help='sampled mode profile F_n or G_n')
    p.add_argument('--k', type=gain_type, default=1., help='feedback gain')
    p.add_argument('--n', type=int_at_least(1), default=spectrum.NMIN, help='mode index')
    p.add_argument('--kind', choices=('F', 'G'), default='F', help='computed (F) or leading-order (G) profile')
    p.add_argument('--grid-size', type=int_at_least(modes.NORM_GRID), default=modes.GRID_SIZE,
                   help='grid intervals')
    p.add_argument('--tol', type=positive_float, default=spectrum.TOLERANCE, help='Newton residual tolerance')
    common(p)

    p = sub.add_parser('closeness', help='quadratic closeness of F_n to G_n')
    p.add_argument('--k', type=gain_type, default=1., help='feedback gain')
    p.add_argument('--n-from', type=int_at_least(spectrum.NMIN), default=10, help='first index')
    p.add_argument('--n-to', type=int_at_least(spectrum.NMIN + 1), default=80, help='last index')
    p.add_argument('--grid-size', type=int_at_least(modes.NORM_GRID), default=modes.GRID_SIZE,
                   help='grid intervals')
    p.add_argument('--tol', type=positive_float, default=spectrum.TOLERANCE, help='Newton residual tolerance')
    common(p)

    p = sub.add_parser('resolvent-check', help='A(A^-1 z) = z on polynomial states')
    p.add_argument('--k', type=gain_type, nargs='+', default=[0.5, 1., 2.], help='gains')
    p.add_argument('--M', type=even_at_least(beamoperator.MIN_RESOLVENT_GRID), default=64, help='grid intervals')
    common(p)

    p = sub.add_parser('simulate', help='energy trace and decay fit')
    p.add_argument('--config', help='YAML file with SimConfig entries; flags override it')
    p.add_argument('--k', type=gain_type, help='feedback gain (default 1)')
    p.add_argument('--M', type=int_at_least(beamoperator.MIN_GENERATOR_GRID), help='grid intervals (default 200)')
    p.add_argument('--dt', type=positive_float, help='time step (default 1e-3)')
    p.add_argument('--t-final', type=positive_float, help='final time (default 5)')
    p.add_argument('--ic', help='initial condition: poly, mixed or "mode j" (default poly)')
    p.add_argument('--record-every', type=int_at_least(1), help='steps between records (default 1)')
    p.add_argument('--window', type=finite_float, nargs=2, metavar=('T0', 'T1'),
                   help='decay fit window (default the last 80%% of the run)')
    p.add_argument('--decay', help='write the decay estimate as JSON to this file')
    p.add_argument('--hdf5', help='also write trace and decay estimate to this HDF5 file')
    common(p)

    p = sub.add_parser('verify', help='run the acceptance checks')
    p.add_argument('--quick', action='store_true', help='desk-scale sizes')
    p.add_argument('--seed', type=int, default=DEFAULT_SEED, help='seed for random test vectors')
    common(p, fmt=False)
    p.add_argument('--format', choices=('table', 'json'), default='table', help='output format')
    return parser


def _spectrum(args, out, processes):
    report = spectrum.compute_spectrum(args.n_max, args.k, args.tol, processes)
    if args.verbose:
        print(report, file=sys.stderr)
    if args.hdf5:
        import h5py
        with h5py.File(args.hdf5, 'w') as f:
            report.addhdf5(f.create_group('SpectrumReport'))
    if args.format == 'csv':
        write_csv(out, SPECTRUM_HEADER, report.rows())
        return
    points = []
    for p, e in zip(report.points, report.asymptote_errors):
        points.append(collections.OrderedDict([
            ('n', int(p.n)), ('re_tau', p.tau.real), ('im_tau', p.tau.imag),
            ('re_lambda', p.lam.real), ('im_lambda', p.lam.imag), ('residual', p.residual),
            ('iterations', int(p.iterations)), ('err_tau', e.err_tau), ('err_re_lambda', e.err_re_lambda),
            ('err_tau_quarter', e.err_tau_quarter)]))
    abscissa, branch = spectrum.abscissa_branch(report)
    write_json(out, 'spectrum', collections.OrderedDict([
        ('k', report.k), ('tolerance', report.tolerance), ('low_mode_count', report.low_count),
        ('spectral_abscissa', abscissa), ('abscissa_branch', branch), ('points', points)]))


def _modes(args, out, processes):
    if args.kind == 'F':
        profile = modes.profile_F(modes.build_mode(spectrum.find_eigenvalue(args.n, args.k, args.tol),
                                                   args.grid_size, args.tol))
    else:
        profile = modes.profile_G(args.n, args.grid_size)
    if args.verbose:
        print(profile, file=sys.stderr)
    if args.format == 'csv':
        write_csv(out, PROFILE_HEADER, profile.to_rows())
        return
    write_json(out, 'modes', collections.OrderedDict([
        ('n', args.n), ('kind', args.kind), ('k', args.k), ('l2_norm', modes.l2_norm(profile)),
        ('x', profile.grid.tolist()),
        ('re_comp1', profile.comp1.real.tolist()), ('im_comp1', profile.comp1.imag.tolist()),
        ('re_comp2', profile.comp2.real.tolist()), ('im_comp2', profile.comp2.imag.tolist())]))


def _closeness(args, out, processes):
    if args.n_to <= args.n_from:
        raise ValueError('--n-to={} must exceed --n-from={}'.format(args.n_to, args.n_from))
    rows = modes.closeness_tail(args.n_from, args.n_to, args.k, args.grid_size, args.tol, processes)
    if args.format == 'csv':
        write_csv(out, CLOSENESS_HEADER, rows)
        return
    write_json(out, 'closeness', collections.OrderedDict([
        ('k', args.k), ('rows', [collections.OrderedDict(zip(CLOSENESS_HEADER, (int(r.n), r.d_n, r.partial_sum)))
                                 for r in rows])]))


RESOLVENT_PSI = (('1', [1.]), ('x', [0., 1.]), ('x^2', [0., 0., 1.]), ('x^3', [0., 0., 0., 1.]))
RESOLVENT_PHI = (('0', [0.]), ('x^2(1-x)', [0., 0., 1., -1.]))


def resolvent_table(gains, M):
    """Rows psi, phi, k, identity residual, max boundary residual, quadrature gap"""
    rows = []
    for k in gains:
        for psiname, psi in RESOLVENT_PSI:
            for phiname, phi in RESOLVENT_PHI:
                check = beamoperator.verify_resolvent(beamoperator.StatePair.from_polynomials(phi, psi, M), k)
                rows.append((psiname, phiname, k, check.identity_residual, max(check.boundary_residuals),
                             check.quadrature_gap))
    return rows


def _resolvent(args, out, processes):
    rows = resolvent_table(args.k, args.M)
    if args.format == 'csv':
        write_csv(out, RESOLVENT_HEADER, rows)
        return
    write_json(out, 'resolvent-check', collections.OrderedDict([
        ('M', args.M), ('rows', [collections.OrderedDict(zip(RESOLVENT_HEADER, row)) for row in rows])]))


def simulation_config(args):
    """SimConfig from --config (if any) with explicit flags on top"""
    settings = {}
    if args.config:
        with open(args.config, 'r') as f:
            settings = simulator.SimConfig.fromYAML(f.read()).asdict()
    for flag, field in (('k', 'k'), ('M', 'M'), ('dt', 'dt'), ('t_final', 't_final'), ('ic', 'ic'),
                        ('record_every', 'record_every')):
        value = getattr(args, flag)
        if value is not None:
            settings[field] = value
    return simulator.SimConfig.fromdict(settings)


def _simulate(args, out, processes):
    config = simulation_config(args)
    trace = simulator.simulate(config)
    decay = None
    if np.all(trace.energy > 0):
        decay = simulator.fit_decay(trace, args.window)
    if args.verbose:
        print(config, file=sys.stderr)
        print(trace, file=sys.stderr)
        print(decay, file=sys.stderr)
    if args.hdf5:
        import h5py
        with h5py.File(args.hdf5, 'w') as f:
            trace.addhdf5(f.create_group('EnergyTrace'))
            if decay is not None:
                decay.addhdf5(f.create_group('DecayEstimate'))
    if args.decay:
        with open(args.decay, 'w') as f:
            write_json(f, 'decay', decay.asdict() if decay is not None else {})
    if args.format == 'csv':
        write_csv(out, TRACE_HEADER, trace.to_rows())
        return
    write_json(out, 'simulate', collections.OrderedDict([
        ('config', config.asdict()),
        ('decay', decay.asdict() if decay is not None else None),
        ('dissipation_defect', simulator.dissipation_check(trace) if len(trace) >= 3 else None),
        ('trace', collections.OrderedDict([('t', trace.times.tolist()), ('E', trace.energy.tolist()),
                                           ('boundary_power', trace.boundary_power.tolist())]))]))


class Check(collections.namedtuple('Check', 'name measured relation threshold status')):
    """One verification line: measured value, relation to the threshold, PASS/FAIL/INFO"""
    __slots__ = ()

    def __str__(self):
        threshold = '' if self.threshold is None else FLOAT_FORMAT.format(self.threshold)
        return '{:<52s} {:>24s} {:>2s} {:<24s} {}'.format(
            self.name, FLOAT_FORMAT.format(self.measured), self.relation, threshold, self.status)


def _check(name, measured, relation, threshold):
    ok = {'<=': measured <= threshold, '<': measured < threshold, '>=': measured >= threshold}[relation]
    return Check(name, float(measured), relation, float(threshold), 'PASS' if ok else 'FAIL')


def _info(name, measured):
    return Check(name, float(measured), '', None, 'INFO')


def _relative_gap(a, b):
    return abs(a - b) / abs(b)


def verify_suite(quick=True, seed=DEFAULT_SEED, processes=1):
    """
    Acceptance checks over all modules.

    :param quick: desk-scale sizes; otherwise grids are doubled and gain sweeps are added
    :param seed: seed for random test vectors
    :param processes: worker processes for index fan-out
    :return checks: list of Check
    """
    scale = 1 if quick else 2
    checks = []

    # eigenvalue asymptotics and stability
    report = spectrum.compute_spectrum(60, 1., processes=processes)
    err = {e.n: e.err_tau for e in report.asymptote_errors}
    checks.append(_check('asymptote max n|tau_n-(n+1/2)pi|, n=10..60', max(n * err[n] for n in range(10, 61)),
                         '<=', 3. * 10. * err[10]))
    offset = {p.n: abs(p.lam.real + 2.) for p in report.points}
    checks.append(_check('asymptote |Re lambda_60 + 2| vs n=10', offset[60], '<', offset[10]))
    for k in (0.5, 1., 2., 4.):
        p = spectrum.find_eigenvalue(50, k)
        checks.append(_check('gain law |Re lambda_50 + 2/k|, k={:g}'.format(k), abs(p.lam.real + 2. / k),
                             '<=', 0.2 * 2. / k))
    for k in (0.5, 1., 2.):
        r = report if k == 1. else spectrum.compute_spectrum(50, k, processes=processes)
        checks.append(_check('stability max Re lambda, k={:g}'.format(k), spectrum.spectral_abscissa(r), '<', 0.))
    r0 = spectrum.compute_spectrum(50, 0., processes=processes)
    checks.append(_check('stability max |Re lambda|, k=0', max(abs(p.lam.real) for p in r0.points), '<=', 1e-10))
    checks.append(_check('conjugate closure max residual, k=1',
                         max(spectrum.conjugate_residual(p, 1.) for p in report.points), '<=',
                         10. * report.tolerance))

    # oracle equivalence
    coarse = beamoperator.build_generator(200 * scale, 1.)
    fine = beamoperator.build_generator(400 * scale, 1.)
    for p in report.points[:3]:
        shift = p.lam * (1. + simulator.ORACLE_OFFSET)
        gap_coarse = _relative_gap(beamoperator.oracle_eigenvalue(coarse, shift), p.lam)
        gap_fine = _relative_gap(beamoperator.oracle_eigenvalue(fine, shift), p.lam)
        checks.append(_check('oracle gap n={} (M={})'.format(p.n, fine.M), gap_fine, '<=', 0.01))
        checks.append(_check('oracle order n={}'.format(p.n), np.log2(gap_coarse / gap_fine), '>=', 1.5))

    # norm limit and quadratic closeness
    grid = modes.GRID_SIZE * scale
    dev20 = modes.norm_limit(20, 1., grid)[1]
    dev50 = modes.norm_limit(50, 1., grid)[1]
    checks.append(_check('norm limit abs(||F_50||^2 - 2)', dev50, '<=', 0.1))
    checks.append(_check('norm limit abs(||F_50||^2 - 2) vs n=20', dev50, '<', dev20))
    rows = modes.closeness_tail(10, 80, 1., grid, processes=processes)
    d = {r.n: r.d_n for r in rows}
    checks.append(_check('closeness max n^2 d_n, n=10..80', max(n * n * d[n] for n in d), '<=', 4. * 100. * d[10]))
    checks.append(_check('closeness S(40..80) vs S(10..40)', sum(d[n] for n in range(40, 81)), '<',
                         sum(d[n] for n in range(10, 41))))

    # resolvent
    table = resolvent_table((0.5, 1., 2.), 64)
    checks.append(_check('resolvent identity max residual', max(max(row[3], row[4]) for row in table), '<=', 1e-12))
    state = beamoperator.StatePair.from_polynomials([0.], [1.], 64)
    x = state.grid
    closed = (-3. * x ** 2 + 5. * x ** 3 - 2. * x ** 4) / 48.
    checks.append(_check('resolvent psi=1 closed form', np.max(np.abs(beamoperator.apply_resolvent(state, 1.).phi -
                                                                      closed)), '<=', 1e-12))
    checks.append(_info('resolvent gain (M=64)', beamoperator.resolvent_gain(
        beamoperator.StatePair.from_polynomials([0., 0., 1., -1.], [1.], 64), 1.)))

    # dissipation form
    rng = np.random.RandomState(seed)
    for k, relation, threshold in ((1., '<=', 1e-8), (0., '<=', 1e-6)):
        gen = beamoperator.build_generator(200, k)
        worst = -np.inf
        for _ in range(100):
            z = rng.standard_normal(gen.size)
            form = beamoperator.dissipation_form(gen, z) / beamoperator.energy_inner(gen, z, z).real
            worst = max(worst, form if k > 0 else abs(form))
        checks.append(_check('dissipation form {}Re<Az,z>/|z|^2, k={:g}'.format('' if k > 0 else '|', k), worst,
                             relation, threshold))

    # energy balance and decay
    reference = simulator.SimConfig(M=200 * scale, dt=1e-3, t_final=5., k=1., ic='mode 1')
    trace = simulator.simulate(reference)
    halved = simulator.simulate(reference.replace(dt=5e-4))
    defect, defect_half = simulator.dissipation_check(trace), simulator.dissipation_check(halved)
    checks.append(_check('energy max relative increase (mode 1)', simulator.max_energy_increase(trace), '<=', 1e-10))
    checks.append(_check('energy balance defect (dt=1e-3)', defect, '<=', 5e-3))
    checks.append(_check('energy balance order in dt', np.log2(defect / defect_half), '>=', 1.5))
    doubled = simulator.simulate(reference.replace(M=2 * reference.M))
    checks.append(_check('grid stability |E(5)_2M - E(5)_M|/E(5)_M (mode 1)',
                         abs(doubled.energy[-1] - trace.energy[-1]) / trace.energy[-1], '<', 0.05))
    rate, branch = simulator.predicted_rate(1., reference.M)
    decay = simulator.fit_decay(trace, (1., 5.))
    checks.append(_check('decay |mu_hat - 2|abscissa||/(2|abscissa|), k=1', abs(decay.mu_hat - rate) / rate,
                         '<=', 0.25))
    poly = simulator.simulate(reference.replace(ic='poly'))
    checks.append(_check('energy max relative increase (poly)', simulator.max_energy_increase(poly), '<=', 1e-10))
    checks.append(_check('poly E(5)/E(0), k=1', poly.energy[-1] / poly.energy[0], '<', 1e-3))
    conservative = simulator.simulate(reference.replace(ic='poly', k=0.))
    E = conservative.energy
    checks.append(_check('conservation max |E-E(0)|/E(0), k=0', np.max(np.abs(E - E[0])) / E[0], '<=', 1e-8))
    checks.append(_check('energy balance defect, k=0', simulator.dissipation_check(conservative), '<=', 1e-6))
    checks.append(_check('decay |mu_hat|, k=0', abs(simulator.fit_decay(conservative, (1., 5.)).mu_hat), '<=', 1e-6))

    if not quick:
        for k, estimate in simulator.gain_sweep(reference.replace(ic='poly'), (0.25, 0.5, 1.)):
            checks.append(_info('gain sweep mu_hat, k={:g}'.format(k), estimate.mu_hat))
        for k, abscissa, branch in spectrum.abscissa_sweep((0.25, 0.5, 1., 2., 4.), processes=processes):
            checks.append(_info('abscissa k={:g} ({})'.format(k, branch), abscissa))
    return checks


def _verify(args, out, processes):
    checks = verify_suite(args.quick, args.seed, processes)
    if args.format == 'json':
        write_json(out, 'verify', collections.OrderedDict([
            ('quick', args.quick), ('seed', args.seed),
            ('checks', [collections.OrderedDict(c._asdict()) for c in checks])]))
    else:
        for check in checks:
            out.write(str(check) + '\n')
    return 1 if any(c.status == 'FAIL' for c in checks) else 0


COMMANDS = {'spectrum': _spectrum, 'modes': _modes, 'closeness': _closeness,
            'resolvent-check': _resolvent, 'simulate': _simulate, 'verify': _verify}


def main(argv=None):
    """
    Run one subcommand.

    :param argv: argument list (default sys.argv[1:])
    :return status: 0 on success, 1 on a module error or failed verification
    """
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        processes = worker_count()
    except ValueError as err:
        parser.error(str(err))
    out = open(args.output, 'w', newline='\n') if args.output else sys.stdout
    try:
        status = COMMANDS[args.command](args, out, processes)
    except (BeamspecError, ValueError, KeyError, OSError, yaml.YAMLError) as err:
        print('{}: {}'.format(err.__class__.__name__, err), file=sys.stderr)
        return 1
    finally:
        if args.output:
            out.close()
    return status or 0


def run(argv):
    """Exit status of ``main(argv)``; argument errors give 2"""
    try:
        return main(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2


if __name__ == '__main__':
    sys.exit(main())
