def execute_command(image):
    image_patch = ImagePatch(image)
    extinguisher_patches = image_patch.find('fire extinguisher')
    if len(extinguisher_patches) == 0:
        return {'function': 'None', 'error': 'No fire extinguisher found.'}
    extinguisher = extinguisher_patches[0]
    return {'function': 'navigate_to_object', 'inputs': (extinguisher.horizontal_center, extinguisher.vertical_center), 'box': [extinguisher.left, extinguisher.lower, extinguisher.right, extinguisher.upper]}
