def execute_command(image):
    image_patch = ImagePatch(image)
    sofa_patches = image_patch.find('sofa')
    if len(sofa_patches) == 0:
        return {'function': 'None', 'error': 'No sofa found.'}
    sofa = sofa_patches[0]
    return {'function': 'navigate_to_object', 'inputs': (sofa.horizontal_center, sofa.vertical_center), 'box': [sofa.left, sofa.lower, sofa.right, sofa.upper]}
