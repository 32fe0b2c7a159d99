#!/usr/bin/env python3
"""
gptkit command line.

Every subcommand reads theory (*.theory) or behavior (*.behavior) files,
runs one analysis and prints a Report on stdout, either as aligned text or
as canonical JSON (--format structured). Logs go to stderr.

Exit status: 0 when the analysis ran, whatever the verdict; 1 when
--verify re-checks a certificate and it fails; 2 on input errors.
"""

import logging
import sys
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence, Tuple

import click

from comeasure import Yes, comeasurable, counting_report
from contextuality import (
    Exists,
    Partition,
    configuration_of,
    congruence_classes,
    congruence_graph,
    contextual_dimension_report,
    count_contextual_configurations,
    enumerate_contextual_configurations,
    gleason_nosignaling_check,
    jd_feasible,
    noncontextual_configurations,
    os_value,
    parse_behavior,
    two_by_two_graph,
    xos_value,
)
from core_model import (
    Mixture,
    Theory,
    TheoryDocument,
    format_point,
    parse_rational,
    parse_theory_document,
    serialize_theory,
    theory_from_document,
    theory_points,
    tomographic_dimension,
    validate_theory,
)
from errors import GptkitError, InputError, ParseError, ValidationError
from exact_geometry import Inside, hull_membership, is_simplex, nonsimpliciality_conditions
from gdit import (
    biased_disturbance,
    build_correspondence,
    build_gdit,
    gdit_from_theory,
    indistinguishability_trial,
    symmetric_disturbance,
)
from log_config import setup_logging
from ontology import (
    Found,
    Witness,
    find_ontic_permutation,
    model_from_document,
    ontic_distributions_product,
    parse_coherent_map,
    prep_contextuality_witness,
)
from reports import Report
from settings import get_settings
from statics import (
    TomographyPlan,
    check_disturbance_consistency,
    chernoff_trials,
    collapse_rules,
    jointly_distinguishable,
    measurement_dimension_bound,
    rules_from_document,
    simulate_clone_tomography,
    state_uncertainty,
    uncertainty_report,
)

logger = logging.getLogger(__name__)

EXISTING_FILE = click.Path(exists=True, dir_okay=False, path_type=Path)


# ---------------------------------------------------------------------------
# Input helpers
# ---------------------------------------------------------------------------

def load_theory(path: Path) -> Tuple[TheoryDocument, Theory]:
    doc = parse_theory_document(path.read_bytes())
    t = theory_from_document(doc)
    report = validate_theory(t)
    if not report.valid:
        raise ValidationError(f"{path.name} is not a valid theory: {'; '.join(report.violations)}",
                              report.violations)
    logger.info(f"✅ Loaded {path.name}: {len(t.measurements)} measurements, {len(t.pure_states)} pure states")
    return doc, t


def parse_mixture(text: str) -> Mixture:
    """"X+:1/2,X-:1/2" -> Mixture."""
    weights = {}
    for part in text.split(','):
        if ':' not in part:
            raise ParseError(f"Mixture term {part!r} must look like state:weight")
        name, weight = part.rsplit(':', 1)
        name = name.strip()
        weights[name] = weights.get(name, Fraction(0)) + parse_rational(weight.strip())
    return Mixture.of(weights)


def parse_query(text: str) -> Tuple[Fraction, ...]:
    """"1/2,1/2 | 1/2,1/2" -> flat vector."""
    return tuple(parse_rational(v.strip()) for block in text.split('|') for v in block.split(',') if v.strip())


def parse_prepare(text: str) -> Tuple[str, int]:
    if '=' not in text:
        raise ParseError(f"Preparation {text!r} must look like MEASUREMENT=OUTCOME")
    name, outcome = text.rsplit('=', 1)
    try:
        return name.strip(), int(outcome)
    except ValueError:
        raise ParseError(f"Outcome in {text!r} is not an integer")


def disturbance_rules(doc: TheoryDocument, t: Theory, source: str):
    if source == 'collapse':
        return collapse_rules(t)
    if source == 'document':
        if not doc.disturbance:
            raise InputError("The theory file has no disturbance section")
        return rules_from_document(t, doc.disturbance)
    gdit = gdit_from_theory(t)
    return symmetric_disturbance(gdit)


def ontic_model(doc: TheoryDocument, t: Theory, kind: str):
    if doc.ontology is not None and doc.ontology.kind == kind:
        return model_from_document(t, doc.ontology)
    if kind == 'g':
        return ontic_distributions_product(t)
    raise InputError("An s-type model needs an s-type ontology section in the theory file")


def emit(ctx: click.Context, report: Report):
    click.echo(report.render(ctx.obj['format']), nl=False)
    if ctx.obj['verify'] and not report.all_checks_passed:
        logger.error(f"❌ Certificate verification failed for {report.command}")
        ctx.exit(1)


class GptkitGroup(click.Group):
    """Maps gptkit errors to exit status 2."""

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except GptkitError as e:
            logger.error(f"❌ {type(e).__name__}: {e}")
            click.echo(f"error: {e}", err=True)
            ctx.exit(2)


# ---------------------------------------------------------------------------
# Command group
# ---------------------------------------------------------------------------

@click.group(cls=GptkitGroup)
@click.option('--format', 'fmt', type=click.Choice(['text', 'structured']), default='text',
              help='Report format')
@click.option('--verify', is_flag=True, default=False, help='Re-check every emitted certificate')
@click.option('--log-level', default=None, help='Override GPTKIT_LOG_LEVEL')
@click.pass_context
def cli(ctx, fmt, verify, log_level):
    """Exact analyses of finite generalized probabilistic theories."""
    settings = get_settings()
    setup_logging(log_level or settings.log_level, settings.log_dir)
    ctx.ensure_object(dict)
    ctx.obj.update(format=fmt, verify=verify)


@cli.command('check-simplex')
@click.argument('theory_file', type=EXISTING_FILE)
@click.option('--query', default=None, help='Point to test for hull membership, e.g. "1/2,1/2|1/2,1/2"')
@click.pass_context
def check_simplex_cmd(ctx, theory_file, query):
    """Is the state space a simplex?"""
    _, t = load_theory(theory_file)
    points = theory_points(t)
    conditions = nonsimpliciality_conditions(points)
    report = Report(command='check-simplex')
    report.add_input(theory_file)
    report.verdict('state_space', 'simplex' if is_simplex(points) else 'non-simplex')
    report.value('dependencies', len(conditions))
    report.value('tomographic_dimension', tomographic_dimension(t))
    report.certificate('dependencies', [c.describe() for c in conditions])
    if ctx.obj['verify']:
        report.checked('dependencies', all(c.holds(points) for c in conditions))
    if query is not None:
        vector = parse_query(query)
        membership = hull_membership(points, vector)
        report.verdict('query', 'inside' if isinstance(membership, Inside) else 'outside')
        if isinstance(membership, Inside):
            report.certificate('query_mixture', membership.mixture.as_dict())
        else:
            report.certificate('query_functional', {
                'coefficients': list(membership.functional.coefficients),
                'offset': membership.functional.offset,
            })
        if ctx.obj['verify']:
            report.checked('query', membership.verify(points, vector))
    emit(ctx, report)


@cli.command('nonsimpliciality')
@click.argument('theory_file', type=EXISTING_FILE)
@click.pass_context
def nonsimpliciality_cmd(ctx, theory_file):
    """List a basis of nonsimpliciality conditions."""
    _, t = load_theory(theory_file)
    points = theory_points(t)
    conditions = nonsimpliciality_conditions(points)
    report = Report(command='nonsimpliciality')
    report.add_input(theory_file)
    report.value('count', len(conditions))
    report.certificate('conditions', [
        {'left': c.left.as_dict(), 'right': c.right.as_dict(), 'text': c.describe()} for c in conditions
    ])
    if ctx.obj['verify']:
        report.checked('conditions', all(c.holds(points) for c in conditions))
    emit(ctx, report)


@cli.command('comeasurable')
@click.argument('theory_file', type=EXISTING_FILE)
@click.option('--pair', nargs=2, required=True, help='Two measurement names')
@click.pass_context
def comeasurable_cmd(ctx, theory_file, pair):
    """Decide joint measurability of two measurements."""
    _, t = load_theory(theory_file)
    result = comeasurable(t, list(pair))
    report = Report(command='comeasurable')
    report.add_input(theory_file)
    report.verdict('comeasurable', 'yes' if isinstance(result, Yes) else 'no')
    report.value('associated_states', list(result.jms.states))
    report.value('dependency_blocks', len(result.jms.conditions))
    if isinstance(result, Yes):
        report.certificate('joint_measurement', dict(sorted(result.values.items())))
    else:
        report.certificate('farkas', {
            'equality_multipliers': list(result.certificate.equality_multipliers),
            'inequality_multipliers': list(result.certificate.inequality_multipliers),
        })
        report.certificate('forced_values', {
            f"M({','.join(str(a) for a in outcomes)}|{state})": value
            for (state, outcomes), value in sorted(result.forced.items())
        })
        report.certificate('forced_conflicts', [
            f"{c.condition.describe()} at {c.outcomes}: {c.left_value} vs {c.right_value}"
            for c in result.conflicts
        ])
    if len(t.measurements) >= 2 and len(set(m.outcome_count for m in t.measurements)) == 1:
        counts = counting_report(len(t.measurements), t.measurements[0].outcome_count, 0)
        report.value('counting', {'constraints': counts.constraints, 'free_variables': counts.free_variables})
    if ctx.obj['verify']:
        report.checked('certificate', result.verify(t))
    emit(ctx, report)


@cli.command('disturbance-check')
@click.argument('theory_file', type=EXISTING_FILE)
@click.option('--rules', 'source', type=click.Choice(['document', 'collapse', 'symmetric']), default=None,
              help='Rule source; defaults to the file section, else eigenstate collapse')
@click.pass_context
def disturbance_check_cmd(ctx, theory_file, source):
    """Check that disturbance rules preserve every nonsimpliciality condition."""
    doc, t = load_theory(theory_file)
    if source is None:
        source = 'document' if doc.disturbance else 'collapse'
    rules = disturbance_rules(doc, t, source)
    result = check_disturbance_consistency(t, rules)
    report = Report(command='disturbance-check')
    report.add_input(theory_file)
    report.verdict('consistent', result.consistent)
    report.verdict('repeatable', not result.repeatability)
    report.value('rules', source)
    report.value('conditions', len(result.conditions))
    report.certificate('violations', [v.describe() for v in result.violations])
    report.certificate('repeatability_violations', [
        f"{v.measurement}={v.outcome} on {v.state} -> {v.image.describe()}" for v in result.repeatability
    ])
    if ctx.obj['verify']:
        report.checked('conditions', all(c.holds(theory_points(t)) for c in result.conditions))
    emit(ctx, report)


@cli.command('uncertainty')
@click.argument('theory_file', type=EXISTING_FILE)
@click.pass_context
def uncertainty_cmd(ctx, theory_file):
    """Largest uncertainty over the pure states."""
    _, t = load_theory(theory_file)
    result = uncertainty_report(t)
    report = Report(command='uncertainty')
    report.add_input(theory_file)
    report.value('uncertainty', result.vertex_value)
    report.value('maximizing_states', list(result.maximizing_states))
    report.value('polytope_uncertainty', result.polytope_value)
    if ctx.obj['verify']:
        report.checked('maximizers', all(state_uncertainty(t.point(s)) == result.vertex_value
                                         for s in result.maximizing_states))
        report.checked('polytope_bound', result.polytope_value >= result.vertex_value)
    emit(ctx, report)


@cli.command('distinguishable')
@click.argument('theory_file', type=EXISTING_FILE)
@click.option('--pair', nargs=2, required=True, help='Two measurement names')
@click.pass_context
def distinguishable_cmd(ctx, theory_file, pair):
    """Are the eigenstates of two measurements jointly distinguishable?"""
    _, t = load_theory(theory_file)
    verdict = jointly_distinguishable(t, list(pair))
    report = Report(command='distinguishable')
    report.add_input(theory_file)
    report.verdict('jointly_distinguishable', verdict)
    report.value('state_bound', measurement_dimension_bound(t))
    emit(ctx, report)


@cli.command('chernoff')
@click.option('--epsilon', required=True, help='Relative accuracy, e.g. 1/2')
@click.option('--delta', required=True, help='Failure probability, e.g. 1/10 or 2/E')
@click.option('--outcomes', type=int, required=True, help='Outcome count n')
@click.pass_context
def chernoff_cmd(ctx, epsilon, delta, outcomes):
    """Trials per measurement for clone tomography."""
    trials = chernoff_trials(epsilon, delta, outcomes)
    report = Report(command='chernoff')
    report.value('epsilon', epsilon)
    report.value('delta', delta)
    report.value('outcomes', outcomes)
    report.value('trials', trials)
    emit(ctx, report)


@cli.command('tomography-sim')
@click.argument('theory_file', type=EXISTING_FILE)
@click.option('--state', required=True, help='Pure state to clone')
@click.option('--trials', type=int, default=None, help='Trials per measurement; default from the Chernoff bound')
@click.option('--epsilon', default='1/2', show_default=True)
@click.option('--delta', default='1/10', show_default=True)
@click.option('--runs', type=int, default=1, show_default=True, help='Independent runs with seeds seed, seed+1, ...')
@click.option('--seed', type=int, default=None, help='Base seed; default GPTKIT_DEFAULT_SEED')
@click.pass_context
def tomography_sim_cmd(ctx, theory_file, state, trials, epsilon, delta, runs, seed):
    """Estimate a state from clones and count deviation events."""
    _, t = load_theory(theory_file)
    t.state(state)
    seed = get_settings().default_seed if seed is None else seed
    n = max(m.outcome_count for m in t.measurements)
    if trials is None:
        plan = TomographyPlan.for_bounds(parse_rational(epsilon), delta, n)
    else:
        plan = TomographyPlan(parse_rational(epsilon), delta, n, trials)
    if runs < 1:
        raise InputError("runs must be at least 1")
    results = [simulate_clone_tomography(t, state, plan, seed + k) for k in range(runs)]
    failures = sum(1 for r in results if r.failed)
    report = Report(command='tomography-sim')
    report.add_input(theory_file)
    report.value('state', state)
    report.value('trials', plan.trials)
    report.value('runs', runs)
    report.value('seed', seed)
    report.value('failures', failures)
    report.value('failure_rate', Fraction(failures, runs))
    report.value('estimate', format_point(results[0].frequencies))
    emit(ctx, report)


@cli.command('gdit')
@click.option('--inputs', 'm', type=int, required=True, help='Number of fiducial measurements m')
@click.option('--outputs', 'n', type=int, required=True, help='Outcomes per measurement n')
@click.option('--disturbance', type=click.Choice(['symmetric', 'biased']), default='symmetric', show_default=True)
@click.option('--agreement', default='1/4', show_default=True, help='Agreement weight of the biased rule')
@click.pass_context
def gdit_cmd(ctx, m, n, disturbance, agreement):
    """Build an (m, n) gdit with a disturbance rule and its corresponding regular theory."""
    g = build_gdit(m, n)
    rules = symmetric_disturbance(g) if disturbance == 'symmetric' else biased_disturbance(g, parse_rational(agreement))
    c = build_correspondence(g, rules)
    report = Report(command='gdit')
    report.value('vertices', len(g.vertices))
    report.value('conditions', len(nonsimpliciality_conditions(theory_points(g.theory))))
    report.value('regular_theory', serialize_theory(c.regular))
    if m >= 2:
        report.value('regular_uncertainty', uncertainty_report(c.regular).vertex_value)
    report.certificate('decompositions', {state: mix.as_dict() for state, mix in c.decompositions})
    if ctx.obj['verify']:
        report.checked('consistency', check_disturbance_consistency(g.theory, rules).consistent)
    emit(ctx, report)


@cli.command('correspond')
@click.argument('theory_file', type=EXISTING_FILE)
@click.option('--rules', 'source', type=click.Choice(['document', 'symmetric']), default='document',
              show_default=True)
@click.pass_context
def correspond_cmd(ctx, theory_file, source):
    """Regular theory corresponding to a gdit file and its disturbance rules."""
    doc, t = load_theory(theory_file)
    g = gdit_from_theory(t)
    c = build_correspondence(g, disturbance_rules(doc, t, source))
    report = Report(command='correspond')
    report.add_input(theory_file)
    report.value('regular_theory', serialize_theory(c.regular))
    if len(t.measurements) >= 2:
        report.value('regular_uncertainty', uncertainty_report(c.regular).vertex_value)
    report.certificate('decompositions', {state: mix.as_dict() for state, mix in c.decompositions})
    emit(ctx, report)


@cli.command('indistinguishability-sim')
@click.argument('theory_file', type=EXISTING_FILE)
@click.option('--prepare', required=True, help='Preparing measurement and outcome, e.g. X=0')
@click.option('--measure', 'then_measure', required=True, help='Second measurement')
@click.option('--trials', type=int, default=10000, show_default=True)
@click.option('--seed', type=int, default=None)
@click.option('--rules', 'source', type=click.Choice(['document', 'symmetric']), default='document',
              show_default=True)
@click.pass_context
def indistinguishability_cmd(ctx, theory_file, prepare, then_measure, trials, seed, source):
    """Compare gdit and regular-theory statistics of a prepare-then-measure sequence."""
    doc, t = load_theory(theory_file)
    g = gdit_from_theory(t)
    c = build_correspondence(g, disturbance_rules(doc, t, source))
    seed = get_settings().default_seed if seed is None else seed
    result = indistinguishability_trial(c, parse_prepare(prepare), then_measure, trials, seed)
    report = Report(command='indistinguishability-sim')
    report.add_input(theory_file)
    report.value('seed', seed)
    report.value('trials', trials)
    report.value('gdit_distribution', list(result.gdit_distribution))
    report.value('regular_distribution', list(result.regular_distribution))
    report.value('total_variation', result.total_variation)
    emit(ctx, report)


@cli.command('ontology')
@click.argument('theory_file', type=EXISTING_FILE)
@click.option('--kind', type=click.Choice(['g', 's']), default='g', show_default=True)
@click.pass_context
def ontology_cmd(ctx, theory_file, kind):
    """Ontic distributions of every pure state."""
    doc, t = load_theory(theory_file)
    model = ontic_model(doc, t, kind)
    report = Report(command='ontology')
    report.add_input(theory_file)
    report.value('kind', model.kind)
    report.value('ontic_points', list(model.ontic_points))
    report.value('intermediate_dimension', model.intermediate_dimension())
    report.value('distributions', {s: {k: w for k, w in model.distribution(s).items() if w} for s in model.states})
    report.value('intermediate_vertices', {name: format_point(p) for name, p in model.intermediate_vertices})
    if ctx.obj['verify']:
        report.checked('model', model.verify())
    emit(ctx, report)


@cli.command('find-coherent')
@click.argument('theory_file', type=EXISTING_FILE)
@click.option('--map', 'map_file', type=EXISTING_FILE, required=True, help='Coherent map file')
@click.option('--kind', type=click.Choice(['g', 's']), default='g', show_default=True)
@click.pass_context
def find_coherent_cmd(ctx, theory_file, map_file, kind):
    """Search for an ontic permutation implementing a coherent map."""
    doc, t = load_theory(theory_file)
    model = ontic_model(doc, t, kind)
    target = parse_coherent_map(map_file.read_bytes())
    result = find_ontic_permutation(model, target)
    report = Report(command='find-coherent')
    report.add_input(theory_file)
    report.add_input(map_file)
    report.value('kind', kind)
    if isinstance(result, Found):
        report.verdict('permutation', 'found')
        report.value('nodes', result.nodes)
        report.certificate('permutation', result.as_dict())
    else:
        report.verdict('permutation', 'impossible')
        report.certificate('signature', {
            'values': list(result.signature),
            'source_count': result.source_count,
            'target_count': result.target_count,
        })
    if ctx.obj['verify']:
        report.checked('certificate', result.verify(model, target))
    emit(ctx, report)


@cli.command('prep-contextuality')
@click.argument('theory_file', type=EXISTING_FILE)
@click.option('--mix-a', required=True, help='First mixture, e.g. "X+:1/2,X-:1/2"')
@click.option('--mix-b', required=True, help='Second mixture')
@click.option('--kind', type=click.Choice(['g', 's']), default='g', show_default=True)
@click.pass_context
def prep_contextuality_cmd(ctx, theory_file, mix_a, mix_b, kind):
    """Do two operationally equal mixtures have different ontic distributions?"""
    doc, t = load_theory(theory_file)
    model = ontic_model(doc, t, kind)
    a, b = parse_mixture(mix_a), parse_mixture(mix_b)
    result = prep_contextuality_witness(model, a, b)
    report = Report(command='prep-contextuality')
    report.add_input(theory_file)
    witnessed = isinstance(result, Witness)
    report.verdict('preparation_contextual', witnessed)
    if witnessed:
        report.certificate('ontic_a', list(result.left))
        report.certificate('ontic_b', list(result.right))
        report.value('support_affinely_dependent', result.support_affinely_dependent)
    else:
        report.certificate('ontic', list(result.distribution))
    if ctx.obj['verify']:
        expected = (result.left, result.right) if witnessed else (result.distribution, result.distribution)
        report.checked('ontic', (model.mixture_distribution(a), model.mixture_distribution(b)) == expected)
    emit(ctx, report)


@cli.command('congruence')
@click.argument('theory_file', type=EXISTING_FILE, required=False)
@click.option('--two-by-two', is_flag=True, default=False, help='Analyze the 2x2 scenario without A1-A2')
@click.pass_context
def congruence_cmd(ctx, theory_file, two_by_two):
    """Congruence graph and its classes (or an intransitivity witness)."""
    if theory_file is None and not two_by_two:
        raise click.UsageError("Give a theory file or --two-by-two")
    report = Report(command='congruence')
    if theory_file is not None:
        _, t = load_theory(theory_file)
        report.add_input(theory_file)
        graph = congruence_graph(t)
    else:
        graph = two_by_two_graph()
    result = congruence_classes(graph)
    report.value('edges', [f"{a}-{b}" for a, b in graph.edges])
    if isinstance(result, Partition):
        report.verdict('transitive', True)
        report.value('classes', [list(c) for c in result.classes])
    else:
        report.verdict('transitive', False)
        report.certificate('witness', [result.a, result.b, result.c])
        if ctx.obj['verify']:
            report.checked('witness', result.verify(graph))
    emit(ctx, report)


@cli.command('jd')
@click.argument('behavior_file', type=EXISTING_FILE)
@click.pass_context
def jd_cmd(ctx, behavior_file):
    """Does a joint distribution reproduce every context?"""
    b = parse_behavior(behavior_file.read_bytes())
    result = jd_feasible(b)
    report = Report(command='jd')
    report.add_input(behavior_file)
    if isinstance(result, Exists):
        report.verdict('joint_distribution', 'exists')
        report.value('measurements', list(result.measurements))
        report.certificate('distribution', {''.join(str(v) for v in o): p for o, p in result.distribution})
    else:
        report.verdict('joint_distribution', 'none')
        report.certificate('farkas', {
            'equality_multipliers': list(result.certificate.equality_multipliers),
            'inequality_multipliers': list(result.certificate.inequality_multipliers),
        })
    if ctx.obj['verify']:
        report.checked('certificate', result.verify(b))
    emit(ctx, report)


def _signaling_summary(report: Report, b):
    gleason = gleason_nosignaling_check(b)
    report.verdict('no_signaling', 'pass' if gleason.no_signaling else 'fail')
    report.certificate('signaling', [v.describe() for v in gleason.violations])


@cli.command('os-eval')
@click.argument('behavior_file', type=EXISTING_FILE)
@click.pass_context
def os_eval_cmd(ctx, behavior_file):
    """<AB> + <BC> + <AC>; noncontextual behaviors stay at or above -1."""
    b = parse_behavior(behavior_file.read_bytes())
    value = os_value(b)
    report = Report(command='os-eval')
    report.add_input(behavior_file)
    report.value('os_value', value)
    report.value('noncontextual_minimum', -1)
    report.verdict('violates', value < -1)
    _signaling_summary(report, b)
    emit(ctx, report)


@cli.command('xos-eval')
@click.argument('behavior_file', type=EXISTING_FILE)
@click.pass_context
def xos_eval_cmd(ctx, behavior_file):
    """Sum of distinctness scores; noncontextual behaviors stay at or below 2."""
    b = parse_behavior(behavior_file.read_bytes())
    value = xos_value(b)
    report = Report(command='xos-eval')
    report.add_input(behavior_file)
    report.value('xos_value', value)
    report.value('noncontextual_maximum', 2)
    report.verdict('violates', value > 2)
    _signaling_summary(report, b)
    emit(ctx, report)


@cli.command('contextual-configs')
@click.argument('behavior_file', type=EXISTING_FILE)
@click.option('--list', 'list_all', is_flag=True, default=False, help='List every configuration')
@click.pass_context
def contextual_configs_cmd(ctx, behavior_file, list_all):
    """Count the deterministic configurations of a behavior's contexts."""
    b = parse_behavior(behavior_file.read_bytes())
    counts = dict(b.outcome_counts)
    report = Report(command='contextual-configs')
    report.add_input(behavior_file)
    report.value('contexts', [','.join(c) for c in b.contexts])
    report.value('configurations', count_contextual_configurations(b.contexts, counts))
    report.value('noncontextual_configurations', sum(1 for _ in noncontextual_configurations(b.contexts, counts)))
    own = configuration_of(b)
    if own is not None:
        report.verdict('deterministic', own.describe())
        report.verdict('contextual', not own.noncontextual)
    if list_all:
        report.value('list', [c.describe() for c in enumerate_contextual_configurations(b.contexts, counts)])
    emit(ctx, report)


@cli.command('dimension-report')
@click.option('--outcomes', 'n', type=int, required=True, help='Outcome count n')
@click.pass_context
def dimension_report_cmd(ctx, n):
    """Dimension counts of the three-context contextual gdit theory."""
    result = contextual_dimension_report(n)
    report = Report(command='dimension-report')
    report.value('outcomes', n)
    report.value('contextual_dimension', result.contextual_dimension)
    report.value('generalized_dimension', result.generalized_dimension)
    report.value('plus_dimension', result.plus_dimension)
    report.value('state_dimension', result.state_dimension)
    report.value('reduction', result.reduction)
    emit(ctx, report)


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Run the command line and return its exit status."""
    try:
        result = cli.main(args=list(argv) if argv is not None else None, prog_name='gptkit',
                          standalone_mode=False)
    except click.ClickException as e:
        e.show()
        return e.exit_code
    except click.exceptions.Abort:
        return 1
    return result if isinstance(result, int) else 0


if __name__ == "__main__":
    sys.exit(run())
