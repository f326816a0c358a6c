from django.core.management.base import BaseCommand, CommandError
from rest_framework import serializers

from ...reports import EXIT_CONFIG_ERROR, EXIT_INFEASIBLE, EXIT_VIOLATIONS
from ...runner import load_config, run
from ...serializers import OPERATIONS

MESSAGES = {
    EXIT_VIOLATIONS: "Violations found.",
    EXIT_INFEASIBLE: "Infeasible constructions or failed preconditions.",
}


class Command(BaseCommand):
    help = "Run a sampled check or witness construction on a PM-space and emit NDJSON report records."

    def add_arguments(self, parser):
        # values are validated with the config, so a bad flag exits like a bad config
        parser.add_argument('operation', help=f"One of: {', '.join(OPERATIONS)}.")
        parser.add_argument('--config', help="YAML or JSON run config.")
        parser.add_argument('--seed', help="Seed of every sample stream (default 0).")
        parser.add_argument('--samples', help="Number of sampled vectors and scalar pairs.")
        parser.add_argument('--out', help="Write the report here instead of stdout.")
        parser.add_argument('--t-grid', help='Evaluation grid as "min,max,count".')
        parser.add_argument('--epsilon', help="Comparison tolerance.")
        parser.add_argument('--record', action='store_true', help="Store the records in the run database.")

    def _config(self, options):
        config = load_config(options['config']) if options['config'] else {}
        if config.get('operation', options['operation']) != options['operation']:
            raise serializers.ValidationError(
                {'operation': [f"The config is for {config['operation']}, not {options['operation']}."]}
            )
        config['operation'] = options['operation']
        budget = dict(config.get('budget') or {})
        if options['samples'] is not None:
            budget['n_vectors'] = budget['n_scalar_pairs'] = options['samples']
        if options['t_grid'] is not None:
            budget['t_grid'] = options['t_grid'].split(',')
        if options['epsilon'] is not None:
            budget['epsilon'] = options['epsilon']
        if budget:
            config['budget'] = budget
        if options['seed'] is not None:
            config['seed'] = options['seed']
        if options['out'] is not None:
            config['out'] = options['out']
        return config

    def handle(self, *args, **options):
        try:
            config = self._config(options)
            out = config.get('out')
            if out:
                with open(out, 'wb') as stream:
                    code = run(config, stream, record=options['record'])
            else:
                code = run(config, _BinaryOutput(self.stdout), record=options['record'])
        except serializers.ValidationError as exc:
            raise CommandError(f"Invalid config: {exc.detail}", returncode=EXIT_CONFIG_ERROR)
        if code:
            raise CommandError(MESSAGES[code], returncode=code)


class _BinaryOutput:
    """Bytes written through the command's stdout wrapper, without its line endings."""

    def __init__(self, wrapper):
        self.wrapper = wrapper

    def write(self, data):
        self.wrapper.write(data.decode('utf-8'), ending='')
        self.wrapper.flush()
