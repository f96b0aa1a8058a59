def execute_command(image):
    image_patch = ImagePatch(image)
    chair_patches = image_patch.find('chair')
    for chair in chair_patches:
        if chair.verify_property('chair', 'white'):
            return {'function': 'navigate_to_object', 'inputs': (chair.horizontal_center, chair.vertical_center), 'box': [chair.left, chair.lower, chair.right, chair.upper]}
    return {'function': 'None', 'error': 'No white chair found.'}
