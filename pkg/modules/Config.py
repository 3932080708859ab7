import os
import sys
import toml
import copy
from modules.Types import ConfigModel, DEFAULT_DATA_DIRECTORY, ENVIRONMENT_OVERRIDES


class Config:
    """Class to handle configuration load and storage."""

    def __init__(self, data_directory=None, config_file=None, overrides={}, create_config=False):
        self.data_directory = os.path.expanduser(data_directory or DEFAULT_DATA_DIRECTORY)
        self.config_file = config_file or os.path.join(self.data_directory, "config.toml")
        self.overrides = overrides
        self.config = self.load_config(self.config_file, create_config)

        if create_config and not os.path.exists(self.config_file):
            os.makedirs(os.path.dirname(os.path.abspath(self.config_file)), exist_ok=True)
            self.save()
            print(f"Created default configuration file {self.config_file}", file=sys.stderr)

    def load_config(self, config_file, create_config=False):
        """Load configuration from the specified file."""
        config_data = {}
        if os.path.exists(config_file):
            try:
                with open(config_file, 'r') as file:
                    config_data = toml.load(file)
            except Exception as e:
                if not create_config:
                    print(f"Error loading config file: {e}", file=sys.stderr)
                    raise e
                config_data = {}

        # Merges dicts recursively, with d2 values taking precedence over d1
        # returns a new dict, does not modify d1 or d2
        def merge_dicts(d1, d2):
            d1 = copy.deepcopy(d1)
            for key, value in d2.items():
                if value is None:
                    continue
                if key in d1 and isinstance(d1[key], dict) and isinstance(value, dict):
                    d1[key] = merge_dicts(d1[key], value)
                else:
                    d1[key] = value
            return d1

        environment = {}
        for variable, key in ENVIRONMENT_OVERRIDES.items():
            value = os.getenv(variable)
            if value:
                print(f"Using {key} = {value} from environment variable {variable}", file=sys.stderr)
                environment[key] = value

        # file < environment < command line
        config_data = merge_dicts(config_data, environment)
        config_data = merge_dicts(config_data, self.overrides)
        return ConfigModel(**config_data)

    def save(self):
        """Save the configuration to the config file."""
        with open(self.config_file, 'w') as f:
            f.write("# gcover configuration file\n\n")
            for key, value in self.config.model_dump().items():
                f.write(f"# {ConfigModel.model_fields[key].description}\n")
                f.write(f"{toml.dumps({key: value})}\n")

    def get(self, key):
        """Get a configuration value by key."""
        return self.data_directory if key == 'data_directory' else getattr(self.config, key)
