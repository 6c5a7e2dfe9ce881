#!/usr/bin/env python3
"""
Setup script for market engine local development
Run this script to verify and setup your development environment
"""

import platform
import subprocess
import sys
from pathlib import Path


def print_step(step_num, description):
    """Print a formatted step"""
    print(f"\n{'=' * 60}")
    print(f"Step {step_num}: {description}")
    print("=" * 60)


def run_command(command, description, required=True, timeout=300):
    """Run a command and handle errors"""
    print(f"Running: {command}")
    try:
        result = subprocess.run(command, shell=True, capture_output=True, text=True, timeout=timeout)
        if result.returncode == 0:
            print(f"✅ {description} - Success")
            if result.stdout.strip():
                print(f"Output: {result.stdout.strip()}")
            return True
        print(f"❌ {description} - Failed")
        print(f"Error: {result.stderr.strip()}")
        if required:
            sys.exit(1)
        return False
    except subprocess.TimeoutExpired:
        print(f"❌ {description} - Timeout")
        return False
    except Exception as e:
        print(f"❌ {description} - Exception: {e}")
        if required:
            sys.exit(1)
        return False


def check_python_version():
    """Check Python version"""
    version = sys.version_info
    print(f"Python version: {version.major}.{version.minor}.{version.micro}")
    if version < (3, 9):
        print("❌ Python 3.9+ required")
        sys.exit(1)
    print("✅ Python version OK")


def setup_virtual_environment():
    """Setup virtual environment"""
    if not Path("venv").exists():
        print("Creating virtual environment...")
        run_command(f"{sys.executable} -m venv venv", "Create virtual environment")
    else:
        print("✅ Virtual environment already exists")

    if platform.system() == "Windows":
        return "venv\\Scripts\\pip", "venv\\Scripts\\python"
    return "venv/bin/pip", "venv/bin/python"


def install_dependencies(pip_path):
    """Install Python dependencies"""
    print("Installing dependencies...")
    run_command(f"{pip_path} install -r requirements.txt", "Install requirements.txt")


def create_directories():
    """Create the runtime directories"""
    for name in ("logs", "markets", "scenarios"):
        Path(name).mkdir(exist_ok=True)
        print(f"✅ Directory ready: {name}")


def main():
    print_step(1, "Check Python version")
    check_python_version()

    print_step(2, "Setup virtual environment")
    pip_path, python_path = setup_virtual_environment()

    print_step(3, "Install dependencies")
    install_dependencies(pip_path)

    print_step(4, "Create directories")
    create_directories()

    print_step(5, "Verify setup")
    run_command(f"{python_path} testing/quick_test.py", "Quick test", required=False)
    run_command(f"{python_path} -m pytest -q -m \"not slow\"", "Fast test suite", required=False)

    print("\n🎉 Setup complete!")
    print(f"Try: {python_path} market_engine.py check -m markets/m1.json -a a,d")


if __name__ == "__main__":
    main()
