"""Simulation, envelope calculus, bounds and trace experiments for tiny-task scheduling models."""
