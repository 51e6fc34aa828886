# -*- coding: utf-8 -*-
# Copyright 2024 Google LLC
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Installation and deployment script."""

import pkg_resources
from setuptools import find_packages
from setuptools import setup


def ParseRequirements(filename):
  """Parse python requirements.

  Args:
    filename (str): The requirement file to read.
  Returns:
    List[str]: a list of requirements.
  """
  install_requires = []
  with open(filename) as requirements:
    install_requires = [
        str(requirement) for requirement in
        pkg_resources.parse_requirements(requirements)]

  return install_requires


description = 'Reinforcement learning with controlled traffic rule exceptions'

long_description = (
    'informed_drive trains driving agents on blocked-lane scenarios, where '
    'reaching the goal requires breaking lower priority traffic rules. '
    'Rewards come from a hierarchical rulebook of temporal logic rules, and '
    'actions are Frenet trajectories tracked by PID controllers.')

setup(
    name='informed_drive',
    version='20240601',
    description=description,
    long_description=long_description,
    author='informed_drive development team',
    license='Apache License, Version 2.0',
    packages=find_packages(exclude=['tests']),
    package_data={'informed_drive': ['rulebooks/*.yaml']},
    install_requires=ParseRequirements('requirements.txt'),
    classifiers=[
        'Development Status :: 4 - Beta',
        'Operating System :: OS Independent',
        'Programming Language :: Python',
    ],
    scripts=['informed_drive/drive_tool.py'],
    entry_points={
        'console_scripts': [
            'informed-drive = informed_drive.drive_tool:main',
        ],
    },
)
