"""Configuration checks, structured logging and the worker pool shared by every command."""
