"""
Config Loader Utility
Reads flat key = value run files and merges them into a RunConfig
"""

import os

from pydantic import ValidationError

from backend.models.config import RunConfig
from backend.models.errors import ConfigError

PRESET_SUFFIX = '.cfg'
_LIST_FIELDS = {'dims'}


class ConfigLoader:
    """
    Utility class for run configuration files.

    Grammar: one `key = value` per line; `#` starts a comment; blank lines are
    ignored. Keys are RunConfig field names, with dashes accepted for underscores.
    List values (dims) are comma separated. An empty value means "unset".
    """

    @staticmethod
    def parse_text(text, source='<string>'):
        """
        Parse config text into a raw dict.

        Args:
            text (str): File contents
            source (str): Name used in error messages

        Returns:
            dict: Field name -> raw value (str, list of str or None)

        Raises:
            ConfigError: On malformed lines, unknown or repeated keys
        """
        known = set(RunConfig.__fields__)
        values = {}
        for number, raw in enumerate(text.splitlines(), start=1):
            line = raw.split('#', 1)[0].strip()
            if not line:
                continue
            if '=' not in line:
                raise ConfigError(f"{source}:{number}: expected 'key = value', got '{raw.strip()}'")

            key, value = (part.strip() for part in line.split('=', 1))
            key = key.replace('-', '_')
            if key not in known:
                raise ConfigError(f"{source}:{number}: unknown key '{key}'")
            if key in values:
                raise ConfigError(f"{source}:{number}: key '{key}' given twice")

            if not value:
                values[key] = None
            elif key in _LIST_FIELDS:
                values[key] = [item.strip() for item in value.split(',') if item.strip()]
            else:
                values[key] = value
        return values

    @staticmethod
    def load_file(path):
        """
        Parse a config file.

        Raises:
            FileNotFoundError: If the file doesn't exist
            ConfigError: On grammar errors
        """
        if not os.path.exists(path):
            raise FileNotFoundError(f"Config file not found: {path}")
        with open(path, 'r', encoding='utf-8') as f:
            return ConfigLoader.parse_text(f.read(), source=path)

    @staticmethod
    def preset_path(name):
        """Path of a shipped preset in backend/data (e.g. 'baseline')."""
        current_dir = os.path.dirname(os.path.abspath(__file__))
        data_dir = os.path.join(os.path.dirname(current_dir), 'data')
        return os.path.join(data_dir, name + PRESET_SUFFIX)

    @staticmethod
    def load_preset(name):
        """Raw values of a shipped preset."""
        return ConfigLoader.load_file(ConfigLoader.preset_path(name))

    @staticmethod
    def build_config(*layers):
        """
        Merge value layers (later layers win, None values skipped) into a RunConfig.

        Args:
            *layers (dict): Raw values, lowest precedence first

        Returns:
            RunConfig: Validated configuration

        Raises:
            ConfigError: If validation fails; the message names the offending fields
        """
        merged = {}
        for layer in layers:
            for key, value in (layer or {}).items():
                if value is not None:
                    merged[key] = value
        try:
            return RunConfig(**merged)
        except ValidationError as e:
            raise ConfigError(f"Invalid configuration: {e}") from e

    @staticmethod
    def dump_text(config):
        """
        Serialize a RunConfig back to the key = value grammar.

        Returns:
            str: Config text that build_config(parse_text(...)) reads back unchanged
        """
        lines = []
        for key, value in config.dict().items():
            if value is None:
                continue
            if isinstance(value, list):
                value = ','.join(str(v) for v in value)
            lines.append(f"{key} = {value}")
        return '\n'.join(lines) + '\n'
