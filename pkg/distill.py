#!/usr/bin/env python3
"""
Corpus Distillation Toolkit
Command-line Entry Point

Reduces a fuzzing corpus to a small subset of seeds that preserves its
edge coverage.
"""

import logging
import os
import sys

import click

from config import config
from distiller import __version__
from distiller.commands import compare, distill, prep, stats, trace, verify

logger = logging.getLogger(__name__)


def create_cli(config_class=config['default']):
    """Command-line factory: one click group bound to a configuration class"""

    @click.group(context_settings={'help_option_names': ['-h', '--help']})
    @click.version_option(__version__, prog_name='distill')
    @click.pass_context
    def cli(ctx):
        """Weighted and unweighted fuzzing corpus distillation"""
        ctx.obj = config_class
        if not config_class.TESTING:
            config_class.init_logging()

    for command in (prep, trace, distill, verify, stats, compare):
        cli.add_command(command)
    return cli


def main():
    """Main entry point for the distill command."""
    env = os.environ.get('DISTILL_ENV', 'default')
    if env not in config:
        print(f"ERROR: unknown DISTILL_ENV '{env}' (expected one of {', '.join(sorted(config))})",
              file=sys.stderr)
        sys.exit(2)

    create_cli(config[env])(prog_name='distill')


if __name__ == '__main__':
    main()
