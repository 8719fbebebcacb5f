"""

Project : nevdodge
Topic   : config_parser
Desc    : parse the YAML run configuration.

"""

# Import standard python modules
import os
import sys
import logging

# Import other python modules
from collections import UserDict
from ruamel import yaml
from ruamel.yaml.scanner import ScannerError

from nevdodge.constants import CONFIG_PATH
from nevdodge.errors import InputError


log = logging.getLogger(__name__)


class Config(UserDict):

    """
    Arguments:
        config_path (str): Path to the configuration file.
        Default: ./config/conf.yaml
        exit_on_error (bool): batch drivers exit with status 1 on a broken
        file; the CLI passes False and receives an InputError instead.

    Public methods:
        load: Loads configuration from configuration YAML file.
        section: One top-level block of the configuration as a dict.

    Attributes and properties:
        config_path (str): Path to the configuration file.
        data(dict): Program configuration.
    """

    def __init__(self, config_path=CONFIG_PATH, exit_on_error: bool = True):
        super().__init__()
        self.config_path = os.path.expanduser(str(config_path))
        self.exit_on_error = exit_on_error
        self.load()

    def _fail(self, msg: str) -> None:
        log.error(msg)
        if self.exit_on_error:
            sys.exit(1)
        raise InputError(msg)

    def load(self):

        """
        loads config from yaml file
        """

        try:
            with open(self.config_path, "r", encoding="utf-8") as f:
                try:
                    self.data = yaml.YAML(typ="safe", pure=True).load(f) or {}
                except ScannerError as e_yaml:
                    self._fail(
                        f"Error parsing YAML config file {self.config_path}:"
                        f"{e_yaml.problem_mark}:{e_yaml.problem}"
                    )
        except FileNotFoundError:
            self._fail(f"YAML file not found in {self.config_path}")

    def section(self, name: str) -> dict:
        """
        Return one block of the configuration, empty when absent.
        """

        block = self.data.get(name) or {}
        if not isinstance(block, dict):
            self._fail(f"Config section {name} is not a mapping")
        return dict(block)
