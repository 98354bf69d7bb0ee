from mopdom.cli.commands import CliError

__all__ = ['CliError']
