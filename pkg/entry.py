"""Run a campaign of nicomachus commands described by a YAML file.

An example of campaign file:

budget_time_sec: 600
commands:
  - command: scan
    global_arguments:
      verbose: True
    arguments:
      max: 1000000
      jobs: 8
      mode: conjecture
      output_folder: reports/<<THIS_FILE_NAME>>/<<RUN_FOLDER>>

becomes the command:
python -m nicomachus --verbose scan --max 1000000 --jobs 8 --mode conjecture
    --output_folder reports/<file name>/<timestamp>_<id>

Commands run in order, one after the other. The config and the output of
every command are logged to logs/<file name>_{YYYY_MM_DD_HH_MM}.log.
The first command exiting with a non-zero code stops the campaign and its
exit code is returned.
"""

import datetime
import os
import shlex
import signal
import subprocess
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, TextIO
from uuid import uuid4

import click
import yaml
from rich.console import Console

current_process = None
console = Console(color_system=None)


class TeePrinter:
    """Print to multiple outputs."""

    def __init__(self, *files: TextIO):
        self.files = files

    def write(self, data: str) -> None:
        for f in self.files:
            f.write(data)
            f.flush()

    def flush(self) -> None:
        for f in self.files:
            f.flush()


def create_dual_console(log_file: Path) -> Console:
    """Create a console that prints to both file and stdout."""
    log_handle = log_file.open('a')
    tee = TeePrinter(sys.stdout, log_handle)
    return Console(file=tee, color_system=None, force_terminal=False)


def cleanup_process() -> None:
    """Terminate the running command, if any."""
    if current_process and current_process.poll() is None:
        current_process.terminate()


def fill_and_load_config(config_file: Path) -> Dict[str, Any]:
    """Load the campaign file after replacing the placeholders.

    <<RUN_FOLDER>> becomes '%Y_%m_%d__%H_%M' plus a short random id and
    <<THIS_FILE_NAME>> the file name without extension.
    """
    raw_config = config_file.read_text()
    unique_id = str(uuid4())[:6]
    raw_config = raw_config.replace(
        '<<RUN_FOLDER>>',
        datetime.datetime.now().strftime('%Y_%m_%d__%H_%M') + "_" + unique_id)
    raw_config = raw_config.replace('<<THIS_FILE_NAME>>', config_file.stem)
    config_data = yaml.safe_load(raw_config) or {}
    if not config_data.get('commands'):
        raise click.UsageError(f"{config_file} defines no commands")
    return config_data


def create_log_file(config_file: Path) -> Path:
    timestamp = datetime.datetime.now().strftime('%Y_%m_%d_%H_%M')
    log_file = Path('logs') / f"{config_file.stem}_{timestamp}.log"
    log_file.parent.mkdir(parents=True, exist_ok=True)
    return log_file


def dump_config_to_log(config: Dict[str, Any], log_file: Path) -> None:
    """Dump the YAML configuration into the log file."""
    with log_file.open('w') as f:
        yaml.dump(config, f)
    global console
    console = create_dual_console(log_file)
    console.print(f"== Config dumped to {log_file} ==")


def to_options(arguments: Dict[str, Any]) -> List[str]:
    """Turn a mapping into click options; True is a bare flag."""
    parts: List[str] = []
    for key, value in arguments.items():
        if isinstance(value, bool):
            if value:
                parts.append(f"--{key}")
        elif isinstance(value, list):
            for item in value:
                parts.extend([f"--{key}", str(item)])
        else:
            parts.extend([f"--{key}", str(value)])
    return parts


def build_command(command_config: Dict[str, Any]) -> List[str]:
    module = command_config.get('module', 'nicomachus')
    cmd_parts = [sys.executable, "-m", module]
    cmd_parts += to_options(command_config.get('global_arguments', {}))
    cmd_parts.append(str(command_config['command']))
    cmd_parts += [str(p) for p in command_config.get('positional', [])]
    cmd_parts += to_options(command_config.get('arguments', {}))
    return cmd_parts


def run_command(command: List[str]) -> int:
    """Run the command, stream its output and return its exit code."""
    global current_process
    try:
        current_process = subprocess.Popen(
            command,
            stdout=subprocess.PIPE,
            stderr=subprocess.STDOUT,
            text=True,
            bufsize=1,
        )
        for line in current_process.stdout:
            console.out(line, end='', highlight=False)
        return current_process.wait()
    finally:
        cleanup_process()


def report_folder(config_data: Dict[str, Any]) -> Optional[str]:
    """output_folder of the last command that sets one."""
    for command in reversed(config_data['commands']):
        folder = command.get('arguments', {}).get('output_folder')
        if folder:
            return str(folder)
    return None


@click.command()
@click.option('--config', type=click.Path(exists=True),
              required=True, help="Path to the YAML config file.")
def main(config: str) -> None:
    """Execute the commands of the campaign file in order."""
    config_file = Path(config)
    config_data = fill_and_load_config(config_file)
    log_file = create_log_file(config_file)
    dump_config_to_log(config=config_data, log_file=log_file)

    budget_time_sec = config_data.get('budget_time_sec', None)

    def timeout_handler(signum, frame):
        console.print("!!! Timeout expired. Cleaning up... !!!")
        cleanup_process()
        raise TimeoutError

    if budget_time_sec:
        console.print(
            f"*** Budget time set to {budget_time_sec} seconds. ***")
        signal.signal(signal.SIGALRM, timeout_handler)
        signal.alarm(int(budget_time_sec))

    exit_code = 0
    try:
        for idx, command_config in enumerate(config_data['commands'],
                                             start=1):
            command = build_command(command_config=command_config)
            console.print(f"== Command {idx})\n{shlex.join(command)}\n==")
            exit_code = run_command(command=command)
            if exit_code != 0:
                console.print(f"!!! Command {idx} exited with {exit_code} !!!")
                break
    except TimeoutError:
        exit_code = 124
    finally:
        if budget_time_sec:
            signal.alarm(0)

    folder = report_folder(config_data=config_data)
    if folder:
        print("Reports stored in folder:")
        print(folder)
    sys.exit(exit_code)


if __name__ == '__main__':
    os.environ.setdefault('PYTHONUNBUFFERED', '1')
    main()


# Example of usage
# python entry.py --config config/conjecture_1e6.yaml
